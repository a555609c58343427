//! Deterministic symbolic household environment.
//!
//! Objects rest on receptacles (surfaces such as `CounterTop`, enclosures
//! such as `Fridge`) or inside portable containers. The agent teleports
//! between receptacles with `GoTo` and carries at most one object. Skills
//! have preconditions checked by [`WorldState::check_applicable`]; a failed
//! skill never changes the state.
//!
//! Thermal flags are exclusive: heating clears `cooled` and cooling clears
//! `heated`, so the latest thermal action wins.

mod action;
mod exec;
pub mod kinds;
mod scene;
mod state;
mod task;

use thiserror::Error;

pub use action::{NotApplicable, SkillAction, Verb};
pub use exec::{execute_plan, ActionTrace, Termination, TraceStep, DEFAULT_STEP_BUDGET};
pub use kinds::{Category, ObjectKind, Properties};
pub use scene::{load_scene, snapshot_scene, ObjectSpec, ReceptacleSpec, SceneSpec, FLOOR};
pub use state::{Agent, Id, Location, ObjectInstance, Receptacle, StateFlag, StateFlags, WorldState};
pub use task::{check_goal, TaskGoal, TaskKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid id `{0}`: use ASCII letters, digits and `_`")]
    InvalidId(String),
    #[error("object `{object}` is located in `{location}`, which is not a receptacle or container in this scene")]
    DanglingLocation { object: String, location: String },
    #[error("unknown object kind `{0}`")]
    UnknownKind(String),
    #[error("`{id}` must be a{} {expected}", if *expected == "object" { "n" } else { "" })]
    WrongCategory { id: String, expected: &'static str },
    #[error("invalid state for `{id}`: {reason}")]
    InvalidState { id: String, reason: String },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("unknown task kind `{0}`")]
    UnknownTaskKind(String),
    #[error("malformed action: {0}")]
    ActionSyntax(String),
    #[error("malformed scene: {0}")]
    SceneFormat(String),
}
