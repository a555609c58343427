use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::world::{SceneSpec, TaskGoal};

pub const EPISODE_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RELevel {
    Explicit,
    Mixed,
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextType {
    Standard,
    Noised,
    Short,
}

impl RELevel {
    pub const ALL: [RELevel; 3] = [RELevel::Explicit, RELevel::Mixed, RELevel::Implicit];

    pub fn as_str(self) -> &'static str {
        match self {
            RELevel::Explicit => "explicit",
            RELevel::Mixed => "mixed",
            RELevel::Implicit => "implicit",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RELevel::Explicit => "Explicit",
            RELevel::Mixed => "Mixed",
            RELevel::Implicit => "Implicit",
        }
    }
}

impl ContextType {
    pub const ALL: [ContextType; 3] = [ContextType::Standard, ContextType::Noised, ContextType::Short];

    pub fn as_str(self) -> &'static str {
        match self {
            ContextType::Standard => "standard",
            ContextType::Noised => "noised",
            ContextType::Short => "short",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ContextType::Standard => "Standard",
            ContextType::Noised => "Noised",
            ContextType::Short => "Short",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {what} `{value}`")]
pub struct UnknownName {
    pub what: &'static str,
    pub value: String,
}

impl FromStr for RELevel {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RELevel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownName { what: "RE level", value: s.into() })
    }
}

impl FromStr for ContextType {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ContextType::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownName { what: "context type", value: s.into() })
    }
}

/// One of the nine (RE level, context type) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VaguenessCell {
    pub level: RELevel,
    pub context: ContextType,
}

impl VaguenessCell {
    pub const fn new(level: RELevel, context: ContextType) -> Self {
        VaguenessCell { level, context }
    }

    /// Level-major order.
    pub fn all() -> Vec<VaguenessCell> {
        RELevel::ALL
            .into_iter()
            .flat_map(|l| ContextType::ALL.into_iter().map(move |c| VaguenessCell::new(l, c)))
            .collect()
    }
}

impl fmt::Display for VaguenessCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.level.as_str(), self.context.as_str())
    }
}

impl FromStr for VaguenessCell {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (l, c) = s
            .split_once(['-', '/', ':'])
            .ok_or_else(|| UnknownName { what: "cell", value: s.into() })?;
        Ok(VaguenessCell::new(l.parse()?, c.parse()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Human,
    Robot,
}

impl Speaker {
    pub fn label(self) -> &'static str {
        match self {
            Speaker::Human => "Human",
            Speaker::Robot => "Robot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum REForm {
    /// Bare noun without determiner ("tomatoes").
    Proper,
    Definite,
    Indefinite,
    Pronoun,
    Attributive,
}

impl REForm {
    pub fn is_explicit(self) -> bool {
        matches!(self, REForm::Proper | REForm::Definite | REForm::Indefinite)
    }
}

/// A referring expression inside a turn. Offsets are byte offsets into the
/// turn text, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub form: REForm,
    pub referent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogueTurn {
    pub speaker: Speaker,
    pub text: String,
    #[serde(default)]
    pub re_annotations: Vec<Annotation>,
}

impl DialogueTurn {
    pub fn new(speaker: Speaker, text: impl Into<String>) -> Self {
        DialogueTurn {
            speaker,
            text: text.into(),
            re_annotations: Vec::new(),
        }
    }

    /// Checks that spans are in bounds, on char boundaries, sorted,
    /// non-overlapping and match their recorded surface.
    pub fn validate(&self) -> Result<(), String> {
        let mut last = 0;
        for a in &self.re_annotations {
            if a.start < last || a.end <= a.start || a.end > self.text.len() {
                return Err(format!("span {}..{} out of order or out of bounds", a.start, a.end));
            }
            match self.text.get(a.start..a.end) {
                Some(s) if s == a.surface => {}
                _ => return Err(format!("span {}..{} does not read `{}`", a.start, a.end, a.surface)),
            }
            last = a.end;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextMemory {
    pub turns: Vec<DialogueTurn>,
}

impl ContextMemory {
    pub fn validate(&self) -> Result<(), String> {
        for (i, t) in self.turns.iter().enumerate() {
            let expected = if i % 2 == 0 { Speaker::Human } else { Speaker::Robot };
            if t.speaker != expected {
                return Err(format!("turn {} should be spoken by {}", i + 1, expected.label()));
            }
            t.validate().map_err(|e| format!("turn {}: {e}", i + 1))?;
        }
        Ok(())
    }

    /// `Human: ...` lines, one per turn.
    pub fn render(&self) -> String {
        self.turns
            .iter()
            .map(|t| format!("{}: {}", t.speaker.label(), t.text))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Deterministic,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lineage {
    pub seed_id: String,
    pub rng_seed: u64,
    pub engine: Engine,
    pub replicate: u32,
    pub short_removal_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Episode {
    pub schema: u32,
    pub id: String,
    pub scene: SceneSpec,
    pub context: ContextMemory,
    pub instruction: DialogueTurn,
    pub goal: TaskGoal,
    pub targets: BTreeSet<String>,
    pub cell: VaguenessCell,
    pub lineage: Lineage,
}

impl Episode {
    pub fn episode_id(seed_id: &str, replicate: u32, cell: VaguenessCell) -> String {
        format!("{seed_id}-r{replicate}-{cell}")
    }
}

/// Explicit and implicit RE counts in context and instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RECountQuad {
    pub ctx_explicit: u32,
    pub ctx_implicit: u32,
    pub ins_explicit: u32,
    pub ins_implicit: u32,
}

impl RECountQuad {
    pub const fn new(ctx_explicit: u32, ctx_implicit: u32, ins_explicit: u32, ins_implicit: u32) -> Self {
        RECountQuad {
            ctx_explicit,
            ctx_implicit,
            ins_explicit,
            ins_implicit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NameCategory {
    Family,
    Friend,
    Neighbor,
    Colleague,
    Stranger,
    ElectronicsBrand,
    RestaurantBrand,
}

impl NameCategory {
    pub const ALL: [NameCategory; 7] = [
        NameCategory::Family,
        NameCategory::Friend,
        NameCategory::Neighbor,
        NameCategory::Colleague,
        NameCategory::Stranger,
        NameCategory::ElectronicsBrand,
        NameCategory::RestaurantBrand,
    ];
}

/// A person or brand name built around a scene object name ("Mug Star").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousName {
    pub surface: String,
    /// Kind name of the object the name is built from.
    pub base_object: String,
    pub category: NameCategory,
}
