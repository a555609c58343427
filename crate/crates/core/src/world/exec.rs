use serde::{Deserialize, Serialize};

use super::action::{NotApplicable, SkillAction};
use super::state::WorldState;

/// Default step budget: roughly three times the longest reference plans.
pub const DEFAULT_STEP_BUDGET: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub action: SkillAction,
    /// `None` when the step applied cleanly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<NotApplicable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// `Done` was executed.
    Done,
    /// Every step ran and the plan ended without `Done`.
    PlanExhausted,
    StepFailed,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct ActionTrace {
    pub steps: Vec<TraceStep>,
    pub final_state: WorldState,
    pub termination: Termination,
}

impl ActionTrace {
    pub fn new(initial: WorldState) -> Self {
        ActionTrace {
            steps: Vec::new(),
            final_state: initial,
            termination: Termination::PlanExhausted,
        }
    }

    pub fn failed(&self) -> bool {
        self.termination == Termination::StepFailed
    }

    /// Records one step against the current final state. Returns `true` while
    /// execution may continue.
    pub fn push(&mut self, action: SkillAction) -> bool {
        match self.final_state.apply_action(&action) {
            Ok(next) => {
                self.final_state = next;
                let done = action == SkillAction::Done;
                self.steps.push(TraceStep { action, failure: None });
                if done {
                    self.termination = Termination::Done;
                }
                !done
            }
            Err(why) => {
                self.steps.push(TraceStep {
                    action,
                    failure: Some(why),
                });
                self.termination = Termination::StepFailed;
                false
            }
        }
    }
}

/// Runs a plan until the first failing step, `Done`, or the budget.
pub fn execute_plan(state: &WorldState, plan: &[SkillAction], budget: usize) -> ActionTrace {
    let mut trace = ActionTrace::new(state.clone());
    for (i, action) in plan.iter().enumerate() {
        if i >= budget {
            trace.termination = Termination::BudgetExhausted;
            break;
        }
        if !trace.push(action.clone()) {
            break;
        }
    }
    trace
}
