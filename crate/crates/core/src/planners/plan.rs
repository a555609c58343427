use serde::{Deserialize, Serialize};

use crate::world::SkillAction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Saycan,
    Llmp,
    Oracle,
}

/// Ordered skill steps. `Done` appears at most once and only last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPlan")]
pub struct Plan {
    steps: Vec<SkillAction>,
    pub provenance: Provenance,
}

#[derive(Deserialize)]
struct RawPlan {
    steps: Vec<SkillAction>,
    provenance: Provenance,
}

impl TryFrom<RawPlan> for Plan {
    type Error = String;
    fn try_from(raw: RawPlan) -> Result<Self, String> {
        Plan::new(raw.steps, raw.provenance)
    }
}

impl Plan {
    pub fn new(steps: Vec<SkillAction>, provenance: Provenance) -> Result<Self, String> {
        if let Some(i) = steps.iter().position(|s| *s == SkillAction::Done) {
            if i + 1 != steps.len() {
                return Err(format!("`Done` at step {} is not the last step", i + 1));
            }
        }
        Ok(Plan { steps, provenance })
    }

    pub fn empty(provenance: Provenance) -> Self {
        Plan {
            steps: Vec::new(),
            provenance,
        }
    }

    pub fn steps(&self) -> &[SkillAction] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_finished(&self) -> bool {
        self.steps.last() == Some(&SkillAction::Done)
    }

    /// Appends a step. Refuses anything after `Done`.
    pub fn push(&mut self, step: SkillAction) -> bool {
        if self.is_finished() {
            return false;
        }
        self.steps.push(step);
        true
    }

    /// The same plan terminated with `Done`.
    pub fn finished(mut self) -> Self {
        self.push(SkillAction::Done);
        self
    }

    pub fn mentions(&self, id: &str) -> bool {
        self.steps.iter().any(|s| s.mentions(id))
    }
}
