use serde::{Deserialize, Serialize};

use crate::world::TaskGoal;

use super::DatasetError;

pub const SEEDS_TEXT: &str = include_str!("../../assets/seeds.json");

/// A one-sentence task request with its ground-truth goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedInstruction {
    pub id: String,
    pub scene: String,
    pub text: String,
    pub goal: TaskGoal,
}

pub fn parse_seeds(text: &str) -> Result<Vec<SeedInstruction>, DatasetError> {
    serde_json::from_str(text).map_err(|e| DatasetError::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

pub fn bundled_seeds() -> Vec<SeedInstruction> {
    parse_seeds(SEEDS_TEXT).expect("bundled seeds are valid")
}
