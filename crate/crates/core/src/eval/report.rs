//! JSON, CSV and Markdown renderings of aggregates. Output depends only on
//! the aggregates passed in.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use super::aggregate::{fmt_delta, fmt_pct, fmt_scaled, Aggregate, CellCounts};
use crate::dataset::{ContextType, RELevel};

pub const REPORT_SCHEMA: u32 = 1;

pub const CLASSIFICATION_RULE: &str = "object omission: some target id never appears as an argument of any plan step; \
execution error: every target appears but the goal does not hold after execution";

/// Placeholder for cells without episodes.
pub const EMPTY_CELL: &str = "—";

pub const TOKEN_COLUMNS: [&str; 4] = ["Avg Input", "Avg Output", "Avg Total", "Latency (ms)"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(format!("unknown report format `{s}` (expected json, csv or markdown)")),
        }
    }
}

fn pct(r: Option<Ratio<u64>>) -> Option<String> {
    r.map(fmt_pct)
}

fn exact(r: Option<Ratio<u64>>) -> Option<String> {
    r.map(|r| format!("{}/{}", r.numer(), r.denom()))
}

fn delta(c: &CellCounts, base: Option<&CellCounts>) -> Option<String> {
    Some(fmt_delta(c.success_rate()?, base?.success_rate()?))
}

fn one_decimal(r: Option<Ratio<u64>>) -> Option<String> {
    r.map(|r| fmt_scaled(r, 1))
}

#[derive(Serialize)]
struct CellDoc {
    level: RELevel,
    context: Option<ContextType>,
    n: u64,
    successes: u64,
    omissions: u64,
    executions: u64,
    success_rate: Option<String>,
    omission_rate: Option<String>,
    execution_rate: Option<String>,
    overall_rate: Option<String>,
    success_rate_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    success_delta: Option<String>,
}

impl CellDoc {
    fn new(level: RELevel, context: Option<ContextType>, c: &CellCounts, base: Option<&CellCounts>) -> Self {
        CellDoc {
            level,
            context,
            n: c.n,
            successes: c.successes,
            omissions: c.omissions,
            executions: c.executions,
            success_rate: pct(c.success_rate()),
            omission_rate: pct(c.omission_rate()),
            execution_rate: pct(c.execution_rate()),
            overall_rate: pct(c.overall_rate()),
            success_rate_exact: exact(c.success_rate()),
            success_delta: delta(c, base),
        }
    }
}

#[derive(Serialize)]
struct UsageDoc {
    episodes: u64,
    steps: u64,
    calls: u64,
    rewrite_calls: u64,
    rewrite_fallbacks: u64,
    choice_fallbacks: u64,
    input_tokens: u64,
    output_tokens: u64,
    total_tokens: u64,
    latency_ms: u64,
    tokens_estimated: bool,
    avg_input: Option<String>,
    avg_output: Option<String>,
    avg_total: Option<String>,
    avg_latency_ms: Option<String>,
}

#[derive(Serialize)]
struct RunDoc {
    run_id: String,
    method: String,
    planner: crate::planners::PlannerKind,
    strategy: crate::strategies::StrategyKind,
    cells: Vec<CellDoc>,
    levels: Vec<CellDoc>,
    overall: CellDoc,
    usage: UsageDoc,
}

#[derive(Serialize)]
struct ReportDoc {
    schema: u32,
    classification_rule: &'static str,
    baseline: Option<String>,
    runs: Vec<RunDoc>,
}

fn run_doc(a: &Aggregate, base: Option<&Aggregate>) -> RunDoc {
    let mut cells = Vec::new();
    for level in RELevel::ALL {
        for ctx in ContextType::ALL {
            let b = base.map(|b| b.cell(level, ctx));
            cells.push(CellDoc::new(level, Some(ctx), &a.cell(level, ctx), b.as_ref()));
        }
    }
    let levels = RELevel::ALL
        .into_iter()
        .map(|l| CellDoc::new(l, None, &a.level(l), base.map(|b| b.level(l)).as_ref()))
        .collect();
    let overall = a.overall();
    let u = &a.usage;
    RunDoc {
        run_id: a.run_id.clone(),
        method: a.method(),
        planner: a.planner,
        strategy: a.strategy,
        cells,
        levels,
        overall: CellDoc {
            context: None,
            ..CellDoc::new(RELevel::Explicit, None, &overall, base.map(|b| b.overall()).as_ref())
        },
        usage: UsageDoc {
            episodes: u.episodes,
            steps: u.steps,
            calls: u.calls,
            rewrite_calls: u.rewrite_calls,
            rewrite_fallbacks: u.rewrite_fallbacks,
            choice_fallbacks: u.choice_fallbacks,
            input_tokens: u.input_tokens,
            output_tokens: u.output_tokens,
            total_tokens: u.total_tokens(),
            latency_ms: u.latency_ms,
            tokens_estimated: u.estimated,
            avg_input: one_decimal(u.avg_input()),
            avg_output: one_decimal(u.avg_output()),
            avg_total: one_decimal(u.avg_total()),
            avg_latency_ms: one_decimal(u.avg_latency()),
        },
    }
}

fn json(runs: &[Aggregate], base: Option<&Aggregate>) -> String {
    let doc = ReportDoc {
        schema: REPORT_SCHEMA,
        classification_rule: CLASSIFICATION_RULE,
        baseline: base.map(|b| b.run_id.clone()),
        runs: runs.iter().map(|a| run_doc(a, base)).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(runs: &[Aggregate], base: Option<&Aggregate>) -> String {
    let mut out = String::from(
        "run_id,planner,strategy,level,context,n,successes,omissions,executions,success_rate,omission_rate,execution_rate,overall_rate,success_delta\n",
    );
    for a in runs {
        for level in RELevel::ALL {
            for ctx in ContextType::ALL {
                let c = a.cell(level, ctx);
                let b = base.map(|b| b.cell(level, ctx));
                let fields = [
                    csv_field(&a.run_id),
                    a.planner.to_string(),
                    a.strategy.to_string(),
                    level.as_str().to_string(),
                    ctx.as_str().to_string(),
                    c.n.to_string(),
                    c.successes.to_string(),
                    c.omissions.to_string(),
                    c.executions.to_string(),
                    pct(c.success_rate()).unwrap_or_default(),
                    pct(c.omission_rate()).unwrap_or_default(),
                    pct(c.execution_rate()).unwrap_or_default(),
                    pct(c.overall_rate()).unwrap_or_default(),
                    delta(&c, b.as_ref()).unwrap_or_default(),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
        }
    }
    out
}

fn md_rate(c: &CellCounts, rate: Option<Ratio<u64>>, base: Option<&CellCounts>) -> String {
    match rate {
        None => EMPTY_CELL.to_string(),
        Some(r) => match delta(c, base) {
            Some(d) => format!("{} {d}", fmt_pct(r)),
            None => fmt_pct(r),
        },
    }
}

fn md_plain(rate: Option<Ratio<u64>>) -> String {
    rate.map(fmt_pct).unwrap_or_else(|| EMPTY_CELL.to_string())
}

fn markdown(runs: &[Aggregate], base: Option<&Aggregate>) -> String {
    let mut s = String::from("# Evaluation report\n\n");
    writeln!(s, "Error classes: {CLASSIFICATION_RULE}.").unwrap();
    if let Some(b) = base {
        writeln!(s, "\nDifferences in parentheses are percentage points against run `{}` ({}).", b.run_id, b.method()).unwrap();
    }
    for a in runs {
        writeln!(s, "\n## {} (run `{}`)\n", a.method(), a.run_id).unwrap();
        s.push_str("### Success rate (%)\n\n| RE level | Standard | Noised | Short | All |\n| --- | ---: | ---: | ---: | ---: |\n");
        for level in RELevel::ALL {
            let mut row = vec![level.label().to_string()];
            for ctx in ContextType::ALL {
                let c = a.cell(level, ctx);
                let b = base.map(|b| b.cell(level, ctx));
                row.push(md_rate(&c, c.success_rate(), b.as_ref()));
            }
            let c = a.level(level);
            row.push(md_rate(&c, c.success_rate(), base.map(|b| b.level(level)).as_ref()));
            writeln!(s, "| {} |", row.join(" | ")).unwrap();
        }
        let mut row = vec!["All".to_string()];
        for ctx in ContextType::ALL {
            let c = a.context(ctx);
            row.push(md_rate(&c, c.success_rate(), base.map(|b| b.context(ctx)).as_ref()));
        }
        let c = a.overall();
        row.push(md_rate(&c, c.success_rate(), base.map(|b| b.overall()).as_ref()));
        writeln!(s, "| {} |", row.join(" | ")).unwrap();

        s.push_str("\n### Errors (%)\n\n| RE level | Context | n | Success | Object omission | Execution error | Overall |\n| --- | --- | ---: | ---: | ---: | ---: | ---: |\n");
        let mut rows: Vec<(String, String, CellCounts)> = Vec::new();
        for level in RELevel::ALL {
            for ctx in ContextType::ALL {
                rows.push((level.label().to_string(), ctx.label().to_string(), a.cell(level, ctx)));
            }
        }
        rows.push(("All".to_string(), "All".to_string(), a.overall()));
        for (l, c, k) in rows {
            writeln!(
                s,
                "| {l} | {c} | {} | {} | {} | {} | {} |",
                k.n,
                md_plain(k.success_rate()),
                md_plain(k.omission_rate()),
                md_plain(k.execution_rate()),
                md_plain(k.overall_rate()),
            )
            .unwrap();
        }
    }
    s.push_str("\n## Token usage per step\n\n");
    writeln!(s, "| Method | {} |", TOKEN_COLUMNS.join(" | ")).unwrap();
    s.push_str("| --- | ---: | ---: | ---: | ---: |\n");
    for a in runs {
        let u = &a.usage;
        let f = |r: Option<Ratio<u64>>| one_decimal(r).unwrap_or_else(|| EMPTY_CELL.to_string());
        writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            a.method(),
            f(u.avg_input()),
            f(u.avg_output()),
            f(u.avg_total()),
            f(u.avg_latency())
        )
        .unwrap();
    }
    if runs.iter().any(|a| a.usage.estimated) {
        s.push_str("\nToken counts are estimates where the provider reported none.\n");
    }
    s
}

/// Renders `runs`, each optionally compared with `baseline`.
pub fn emit_report(runs: &[Aggregate], baseline: Option<&Aggregate>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => json(runs, baseline),
        ReportFormat::Csv => csv(runs, baseline),
        ReportFormat::Markdown => markdown(runs, baseline),
    }
}
