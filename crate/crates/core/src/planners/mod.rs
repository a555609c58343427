//! Planners: step-wise constrained skill selection and translate-then-search.
//!
//! The search side works on a small STRIPS dialect read from an s-expression
//! domain file. [`lower`] maps world states and goals into that dialect and
//! [`solve`] returns minimal-length plans as world skills.

pub mod domain;
pub mod llmp;
pub mod lower;
pub mod nl;
mod plan;
pub mod problem;
pub mod saycan;
pub mod sexpr;
pub mod solve;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::Usage;

pub use domain::{Atom, DomainModel};
pub use llmp::plan_llmp;
pub use saycan::{plan_saycan, SaycanConfig};
pub use nl::{nl_to_plan, plan_to_nl};
pub use plan::{Plan, Provenance};
pub use problem::{parse_problem, ProblemInstance};
pub use sexpr::Pos;
pub use solve::{solve, DEFAULT_SEARCH_BUDGET};

/// Planner kinds the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Saycan,
    Llmp,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 2] = [PlannerKind::Saycan, PlannerKind::Llmp];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Saycan => "saycan",
            PlannerKind::Llmp => "llmp",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PlannerKind::Saycan => "SayCan",
            PlannerKind::Llmp => "LLM+P",
        }
    }
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "saycan" => Ok(PlannerKind::Saycan),
            "llmp" | "llm+p" | "llm-p" => Ok(PlannerKind::Llmp),
            _ => Err(format!("unknown planner `{s}` (expected saycan or llmp)")),
        }
    }
}

/// A finished planning attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannerOutput {
    pub plan: Plan,
    pub usage: Usage,
    /// Choices or translations that fell back to a default.
    pub fallbacks: u32,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}")]
    Syntax(#[from] sexpr::SyntaxError),
    #[error("{pos}: unknown predicate `{name}`")]
    UnknownPredicate { pos: Pos, name: String },
    #[error("{pos}: `{pred}` takes {expected} argument(s), got {found}")]
    Arity {
        pos: Pos,
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax(e) => e.pos,
            ParseError::UnknownPredicate { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::Malformed { pos, .. } => *pos,
        }
    }

    /// Short machine-readable class used by fixtures and the C API.
    pub fn class(&self) -> &'static str {
        match self {
            ParseError::Syntax(_) => "unbalanced",
            ParseError::UnknownPredicate { .. } => "unknown-predicate",
            ParseError::Arity { .. } => "arity",
            ParseError::Malformed { .. } => "malformed",
        }
    }
}
