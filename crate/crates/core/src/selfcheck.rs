//! Scripted-provider checks behind `reibench selfcheck`.
//!
//! Every check runs offline against the bundled assets. The integration
//! suite covers the same ground with independent oracles; these are the
//! checks a user can run on an installed binary.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::sample::stratified_indices;
use crate::dataset::{
    bundled_seeds, filter_episode, generate_unit, table3, to_jsonl, ContextType, Episode, FilterRules, GenConfig,
    Generator, RECountQuad, RELevel,
};
use crate::eval::{
    aggregate, emit_report, fmt_pct, records_to_jsonl, run_all, Aggregate, CellCounts, EvalConfig, EvalRecord,
    ReportFormat, TOKEN_COLUMNS,
};
use crate::gateway::{ScriptedMode, ScriptedProvider};
use crate::planners::{lower::lower_task, solve, DomainModel, PlannerKind, DEFAULT_SEARCH_BUDGET};
use crate::strategies::{StrategyConfig, StrategyKind};
use crate::world::{check_goal, execute_plan, load_scene, TaskKind};

pub const ORACLE_BUDGET: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// One seed replicate per task type, all nine cells: 54 episodes.
pub fn fixture_episodes(run_seed: u64) -> Vec<Episode> {
    let seeds = bundled_seeds();
    let cfg = GenConfig {
        run_seed,
        ..GenConfig::default()
    };
    let mut out = Vec::new();
    for kind in TaskKind::ALL {
        let seed = seeds
            .iter()
            .find(|s| s.goal.kind() == kind)
            .expect("bundled seeds cover every task type");
        out.extend(generate_unit(seed, &cfg, 0, Generator::Deterministic).expect("bundled seeds generate"));
    }
    out
}

pub fn scripted_run(
    episodes: &[Episode],
    mode: ScriptedMode,
    planner: PlannerKind,
    strategy: StrategyKind,
) -> Vec<EvalRecord> {
    let run_id = format!("{}-{}-{}", mode, planner, strategy);
    let cfg = EvalConfig::new(run_id, planner, StrategyConfig::new(strategy));
    run_all(episodes, &cfg, &ScriptedProvider::new(mode, 0), 1)
}

/// The eighteen filter cases: for each row a minimal accepted quad, an
/// accepted quad with slack, and one rejection per column.
pub fn filter_cases() -> Vec<(RELevel, RECountQuad, bool)> {
    let q = RECountQuad::new;
    vec![
        (RELevel::Explicit, q(3, 1, 0, 0), true),
        (RELevel::Explicit, q(7, 4, 0, 0), true),
        (RELevel::Explicit, q(2, 1, 0, 0), false),
        (RELevel::Explicit, q(3, 0, 0, 0), false),
        (RELevel::Explicit, q(3, 1, 1, 0), false),
        (RELevel::Explicit, q(3, 1, 0, 1), false),
        (RELevel::Mixed, q(3, 0, 0, 1), true),
        (RELevel::Mixed, q(6, 0, 0, 3), true),
        (RELevel::Mixed, q(2, 0, 0, 1), false),
        (RELevel::Mixed, q(3, 1, 0, 1), false),
        (RELevel::Mixed, q(3, 0, 1, 1), false),
        (RELevel::Mixed, q(3, 0, 0, 0), false),
        (RELevel::Implicit, q(1, 0, 2, 1), true),
        (RELevel::Implicit, q(4, 0, 5, 2), true),
        (RELevel::Implicit, q(0, 0, 2, 1), false),
        (RELevel::Implicit, q(1, 1, 2, 1), false),
        (RELevel::Implicit, q(1, 0, 1, 1), false),
        (RELevel::Implicit, q(1, 0, 2, 0), false),
    ]
}

fn pct(r: Option<Ratio<u64>>) -> String {
    r.map(fmt_pct).unwrap_or_else(|| "-".into())
}

fn rate(a: &Aggregate, level: RELevel, context: ContextType) -> Ratio<u64> {
    a.cell(level, context).success_rate().unwrap_or_default()
}

fn points(r: Ratio<u64>) -> Ratio<i64> {
    Ratio::new(*r.numer() as i64 * 100, *r.denom() as i64)
}

fn decomposes(c: &CellCounts) -> bool {
    match (c.success_rate(), c.omission_rate(), c.execution_rate()) {
        (Some(s), Some(o), Some(e)) => o + e == Ratio::from_integer(1) - s,
        _ => true,
    }
}

fn check_oracle(fixtures: &[Episode]) -> (CheckOutcome, Vec<EvalRecord>) {
    let start = Instant::now();
    let records = scripted_run(fixtures, ScriptedMode::PerfectResolution, PlannerKind::Saycan, StrategyKind::None);
    let elapsed = start.elapsed();
    let ok = records.iter().filter(|r| r.success).count();
    let outcome = CheckOutcome {
        id: 1,
        name: "oracle success",
        passed: ok == records.len() && records.len() == 54 && elapsed < ORACLE_BUDGET,
        detail: format!("{ok}/{} succeeded in {:.2} s", records.len(), elapsed.as_secs_f64()),
    };
    (outcome, records)
}

fn check_ordering(blind: &Aggregate) -> CheckOutcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for c in ContextType::ALL {
        let (e, m, i) = (
            rate(blind, RELevel::Explicit, c),
            rate(blind, RELevel::Mixed, c),
            rate(blind, RELevel::Implicit, c),
        );
        passed &= e > m && m >= i && points(e) - points(i) >= Ratio::from_integer(20);
        parts.push(format!("{} {}/{}/{}", c.as_str(), fmt_pct(e), fmt_pct(m), fmt_pct(i)));
    }
    CheckOutcome {
        id: 2,
        name: "degradation ordering",
        passed,
        detail: parts.join(", "),
    }
}

fn check_tocc(blind: &Aggregate, tocc: &Aggregate) -> CheckOutcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for level in RELevel::ALL {
        for c in ContextType::ALL {
            let d = points(rate(tocc, level, c)) - points(rate(blind, level, c));
            passed &= match level {
                RELevel::Explicit => d <= Ratio::from_integer(2) && d >= Ratio::from_integer(-2),
                _ => d >= Ratio::from_integer(10),
            };
        }
        let d = points(tocc.level(level).success_rate().unwrap_or_default())
            - points(blind.level(level).success_rate().unwrap_or_default());
        parts.push(format!("{} {:+.1}", level.as_str(), *d.numer() as f64 / *d.denom() as f64));
    }
    CheckOutcome {
        id: 3,
        name: "TOCC recovery",
        passed,
        detail: parts.join(", "),
    }
}

fn check_decomposition(runs: &[&Aggregate]) -> CheckOutcome {
    let exact = runs.iter().all(|a| a.cells.values().all(decomposes) && decomposes(&a.overall()));
    let row = CellCounts {
        n: 1000,
        successes: 469,
        omissions: 226,
        executions: 305,
    };
    let overall = pct(row.overall_rate());
    CheckOutcome {
        id: 4,
        name: "error decomposition",
        passed: exact && decomposes(&row) && overall == "53.1",
        detail: format!(
            "{} runs exact; {} + {} = {overall}",
            runs.len(),
            pct(row.omission_rate()),
            pct(row.execution_rate())
        ),
    }
}

fn check_filter() -> CheckOutcome {
    let rules = FilterRules::printed();
    let cases = filter_cases();
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(l, q, want)| filter_episode(*q, *l, &rules) != *want)
        .map(|(l, q, _)| format!("{} {:?}", l.as_str(), q))
        .collect();
    CheckOutcome {
        id: 5,
        name: "counting filter",
        passed: wrong.is_empty(),
        detail: if wrong.is_empty() {
            format!("{}/{} quads classified", cases.len(), cases.len())
        } else {
            format!("misclassified {}", wrong.join("; "))
        },
    }
}

fn sample_counts(seed: u64) -> Vec<u64> {
    let pool: Vec<TaskKind> = (0..10_000).map(|i| TaskKind::ALL[i % 6]).collect();
    let idx = stratified_indices(&pool, 1000, &table3(), &mut ChaCha8Rng::seed_from_u64(seed)).expect("pool is large");
    let mut by_kind: BTreeMap<TaskKind, u64> = BTreeMap::new();
    for i in &idx {
        *by_kind.entry(pool[*i]).or_default() += 1;
    }
    table3().iter().map(|(k, _)| by_kind.get(k).copied().unwrap_or(0)).collect()
}

fn check_sampler() -> CheckOutcome {
    let counts = sample_counts(7);
    let again = sample_counts(7);
    let pool: Vec<TaskKind> = (0..10_000).map(|i| TaskKind::ALL[i % 6]).collect();
    let a = stratified_indices(&pool, 1000, &table3(), &mut ChaCha8Rng::seed_from_u64(7)).expect("pool is large");
    let b = stratified_indices(&pool, 1000, &table3(), &mut ChaCha8Rng::seed_from_u64(7)).expect("pool is large");
    let shown: Vec<String> = counts.iter().map(u64::to_string).collect();
    CheckOutcome {
        id: 6,
        name: "stratified sampler",
        passed: counts == [168, 168, 162, 133, 184, 185] && counts == again && a == b,
        detail: format!("counts {}", shown.join("/")),
    }
}

fn check_solver() -> CheckOutcome {
    let mut failures = Vec::new();
    let seeds = bundled_seeds();
    for seed in &seeds {
        let scene = crate::assets::scene(&seed.scene).expect("bundled scene");
        let state = load_scene(&scene).expect("bundled scene loads");
        let reached = solve(DomainModel::household(), &lower_task(&state, &seed.goal), DEFAULT_SEARCH_BUDGET)
            .map(|p| {
                let trace = execute_plan(&state, p.steps(), p.len() + 1);
                !trace.failed() && check_goal(&trace.final_state, &seed.goal) == Ok(true)
            })
            .unwrap_or(false);
        if !reached {
            failures.push(seed.id.clone());
        }
    }
    CheckOutcome {
        id: 7,
        name: "solver plans execute",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} seed goals planned and reached", seeds.len())
        } else {
            format!("failed: {}", failures.join(", "))
        },
    }
}

fn pipeline_bytes() -> (String, String, String) {
    let episodes = fixture_episodes(11);
    let records = scripted_run(&episodes, ScriptedMode::ContextBlind, PlannerKind::Saycan, StrategyKind::Tocc);
    let agg = aggregate(&records).expect("non-empty run");
    (
        to_jsonl(&episodes),
        records_to_jsonl(&records),
        emit_report(&[agg], None, ReportFormat::Markdown),
    )
}

fn check_determinism() -> CheckOutcome {
    let a = pipeline_bytes();
    let b = pipeline_bytes();
    let same = [a.0 == b.0, a.1 == b.1, a.2 == b.2];
    CheckOutcome {
        id: 9,
        name: "pipeline determinism",
        passed: same.iter().all(|s| *s),
        detail: format!("dataset {}, records {}, report {}", same[0], same[1], same[2]),
    }
}

fn check_tokens(fixtures: &[Episode], none: &[EvalRecord]) -> CheckOutcome {
    let tocc = scripted_run(fixtures, ScriptedMode::PerfectResolution, PlannerKind::Saycan, StrategyKind::Tocc);
    let additive = none.iter().chain(&tocc).all(|r| r.total_tokens == r.input_tokens + r.output_tokens);
    let one_extra = none
        .iter()
        .zip(&tocc)
        .all(|(a, b)| a.episode_id == b.episode_id && b.calls == a.calls + 1);
    let (ta, tb) = (aggregate(none).expect("run"), aggregate(&tocc).expect("run"));
    let more = tb.usage.total_tokens() > ta.usage.total_tokens();
    let md = emit_report(&[ta.clone(), tb.clone()], None, ReportFormat::Markdown);
    let header = format!("| {} |", TOKEN_COLUMNS.join(" | "));
    let columns = md.lines().any(|l| l.ends_with(&header));
    CheckOutcome {
        id: 10,
        name: "token accounting",
        passed: additive && one_extra && more && columns,
        detail: format!(
            "total {} -> {} tokens, calls {} -> {}",
            ta.usage.total_tokens(),
            tb.usage.total_tokens(),
            ta.usage.calls,
            tb.usage.calls
        ),
    }
}

/// Runs every check in order. The world-equivalence check needs a
/// reference interpreter and lives only in the integration suite.
pub fn run_selfcheck() -> Vec<CheckOutcome> {
    let fixtures = fixture_episodes(0);
    let (c1, perfect) = check_oracle(&fixtures);
    let blind = scripted_run(&fixtures, ScriptedMode::ContextBlind, PlannerKind::Saycan, StrategyKind::None);
    let tocc = scripted_run(&fixtures, ScriptedMode::ContextBlind, PlannerKind::Saycan, StrategyKind::Tocc);
    let (ap, ab, at) = (
        aggregate(&perfect).expect("run"),
        aggregate(&blind).expect("run"),
        aggregate(&tocc).expect("run"),
    );
    vec![
        c1,
        check_ordering(&ab),
        check_tocc(&ab, &at),
        check_decomposition(&[&ap, &ab, &at]),
        check_filter(),
        check_sampler(),
        check_solver(),
        check_determinism(),
        check_tokens(&fixtures, &perfect),
    ]
}
