//! Pure folds over records. Rates stay exact until formatting.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::record::{ErrorClass, EvalRecord};
use super::EvalError;
use crate::dataset::{ContextType, RELevel, VaguenessCell};
use crate::planners::PlannerKind;
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CellCounts {
    pub n: u64,
    pub successes: u64,
    pub omissions: u64,
    pub executions: u64,
}

impl CellCounts {
    pub fn add(&mut self, r: &EvalRecord) {
        self.n += 1;
        match r.error {
            ErrorClass::None => self.successes += u64::from(r.success),
            ErrorClass::ObjectOmission => self.omissions += 1,
            ErrorClass::ExecutionError => self.executions += 1,
        }
    }

    pub fn merge(&mut self, o: &CellCounts) {
        self.n += o.n;
        self.successes += o.successes;
        self.omissions += o.omissions;
        self.executions += o.executions;
    }

    fn rate(&self, k: u64) -> Option<Ratio<u64>> {
        (self.n > 0).then(|| Ratio::new(k, self.n))
    }

    pub fn success_rate(&self) -> Option<Ratio<u64>> {
        self.rate(self.successes)
    }

    pub fn omission_rate(&self) -> Option<Ratio<u64>> {
        self.rate(self.omissions)
    }

    pub fn execution_rate(&self) -> Option<Ratio<u64>> {
        self.rate(self.executions)
    }

    /// Failure rate, the sum of the two error rates.
    pub fn overall_rate(&self) -> Option<Ratio<u64>> {
        self.rate(self.omissions + self.executions)
    }
}

/// Token and latency totals; report averages are per planning step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UsageSummary {
    pub episodes: u64,
    pub steps: u64,
    pub calls: u64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
    pub rewrite_calls: u64,
    pub rewrite_fallbacks: u64,
    pub choice_fallbacks: u64,
    pub estimated: bool,
}

impl UsageSummary {
    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }

    fn per_step(&self, v: u64) -> Option<Ratio<u64>> {
        (self.steps > 0).then(|| Ratio::new(v, self.steps))
    }

    pub fn avg_input(&self) -> Option<Ratio<u64>> {
        self.per_step(self.input_tokens)
    }

    pub fn avg_output(&self) -> Option<Ratio<u64>> {
        self.per_step(self.output_tokens)
    }

    pub fn avg_total(&self) -> Option<Ratio<u64>> {
        self.per_step(self.total_tokens())
    }

    pub fn avg_latency(&self) -> Option<Ratio<u64>> {
        self.per_step(self.latency_ms)
    }
}

/// One run folded: the 3×3 grid, error decomposition and usage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregate {
    pub run_id: String,
    pub planner: PlannerKind,
    pub strategy: StrategyKind,
    pub cells: BTreeMap<VaguenessCell, CellCounts>,
    pub usage: UsageSummary,
}

impl Aggregate {
    pub fn cell(&self, level: RELevel, context: ContextType) -> CellCounts {
        self.cells.get(&VaguenessCell::new(level, context)).copied().unwrap_or_default()
    }

    pub fn level(&self, level: RELevel) -> CellCounts {
        let mut c = CellCounts::default();
        for ctx in ContextType::ALL {
            c.merge(&self.cell(level, ctx));
        }
        c
    }

    pub fn context(&self, context: ContextType) -> CellCounts {
        let mut c = CellCounts::default();
        for level in RELevel::ALL {
            c.merge(&self.cell(level, context));
        }
        c
    }

    pub fn overall(&self) -> CellCounts {
        let mut c = CellCounts::default();
        for v in self.cells.values() {
            c.merge(v);
        }
        c
    }

    /// Label used for this run in token tables.
    pub fn method(&self) -> String {
        format!("{} + {}", self.planner.label(), self.strategy.label())
    }
}

pub fn aggregate(records: &[EvalRecord]) -> Result<Aggregate, EvalError> {
    let first = records.first().ok_or(EvalError::NoRecords)?;
    let mut cells: BTreeMap<VaguenessCell, CellCounts> = BTreeMap::new();
    let mut usage = UsageSummary::default();
    for r in records {
        if r.run_id != first.run_id {
            return Err(EvalError::MixedRuns(first.run_id.clone(), r.run_id.clone()));
        }
        cells.entry(r.cell).or_default().add(r);
        usage.episodes += 1;
        usage.steps += r.planning_steps;
        usage.calls += r.calls;
        usage.input_tokens += r.input_tokens;
        usage.output_tokens += r.output_tokens;
        usage.latency_ms += r.latency_ms;
        usage.choice_fallbacks += u64::from(r.choice_fallbacks);
        usage.estimated |= r.tokens_estimated;
        if let Some(rw) = &r.rewrite {
            usage.rewrite_calls += 1;
            usage.rewrite_fallbacks += u64::from(rw.fallback);
        }
    }
    Ok(Aggregate {
        run_id: first.run_id.clone(),
        planner: first.planner,
        strategy: first.strategy,
        cells,
        usage,
    })
}

/// Percentage with one decimal, half away from zero.
pub fn fmt_pct(r: Ratio<u64>) -> String {
    fmt_scaled(r * 100, 1)
}

/// Non-negative value with `decimals` places, half away from zero.
pub fn fmt_scaled(r: Ratio<u64>, decimals: u32) -> String {
    let scale = 10u64.pow(decimals);
    let scaled = r * scale;
    let units = (scaled + Ratio::new(1, 2)).floor().to_integer();
    if decimals == 0 {
        return units.to_string();
    }
    format!("{}.{:0width$}", units / scale, units % scale, width = decimals as usize)
}

/// Signed difference of two rates in percentage points, parenthesized.
pub fn fmt_delta(current: Ratio<u64>, baseline: Ratio<u64>) -> String {
    if current >= baseline {
        format!("(+{})", fmt_pct(current - baseline))
    } else {
        format!("(-{})", fmt_pct(baseline - current))
    }
}
