use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::VaguenessCell;
use crate::planners::PlannerKind;
use crate::strategies::StrategyKind;
use crate::world::{SkillAction, TaskKind, Termination, TraceStep};

pub const RECORD_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    None,
    ObjectOmission,
    ExecutionError,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::None => "none",
            ErrorClass::ObjectOmission => "object-omission",
            ErrorClass::ExecutionError => "execution-error",
        }
    }
}

/// A failed plan is an object omission when some target id is never an
/// argument of any step, and an execution error otherwise.
pub fn classify_error(plan: &[SkillAction], targets: &BTreeSet<String>, success: bool) -> ErrorClass {
    if success {
        return ErrorClass::None;
    }
    let omitted = targets.iter().any(|t| !plan.iter().any(|s| s.mentions(t)));
    if omitted {
        ErrorClass::ObjectOmission
    } else {
        ErrorClass::ExecutionError
    }
}

/// The TOCC rewrite as recorded for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteAudit {
    pub text: String,
    pub fallback: bool,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub schema: u32,
    pub run_id: String,
    pub run_seed: u64,
    pub episode_id: String,
    pub cell: VaguenessCell,
    pub task: TaskKind,
    pub planner: PlannerKind,
    pub strategy: StrategyKind,
    pub plan: Vec<SkillAction>,
    pub trace: Vec<TraceStep>,
    pub termination: Termination,
    pub success: bool,
    pub error: ErrorClass,
    /// Planning decisions: one per selected skill, or one translation.
    pub planning_steps: u64,
    /// Gateway calls, strategy calls included.
    pub calls: u64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub total_tokens: u64,
    pub latency_ms: u64,
    pub tokens_estimated: bool,
    pub choice_fallbacks: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewrite: Option<RewriteAudit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(steps: &[&str]) -> Vec<SkillAction> {
        steps.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn set(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn omission_versus_execution() {
        let wrong = plan(&["GoTo(Cabinet)", "PickUp(plate)", "Done"]);
        assert_eq!(classify_error(&wrong, &set(&["potato"]), false), ErrorClass::ObjectOmission);
        let touched = plan(&["GoTo(CounterTop)", "PickUp(potato)", "Done"]);
        assert_eq!(classify_error(&touched, &set(&["potato"]), false), ErrorClass::ExecutionError);
        assert_eq!(classify_error(&[], &set(&["potato"]), false), ErrorClass::ObjectOmission);
        assert_eq!(classify_error(&[], &set(&["potato"]), true), ErrorClass::None);
    }

    #[test]
    fn any_missing_target_is_omission() {
        let p = plan(&["PickUp(apple)", "PutIn(apple, Cabinet)"]);
        assert_eq!(classify_error(&p, &set(&["apple", "bowl"]), false), ErrorClass::ObjectOmission);
        let p = plan(&["PickUp(apple)", "PutIn(apple, bowl)"]);
        assert_eq!(classify_error(&p, &set(&["apple", "bowl"]), false), ErrorClass::ExecutionError);
    }
}
