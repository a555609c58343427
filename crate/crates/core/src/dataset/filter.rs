//! Counting-based filter.

use serde::{Deserialize, Serialize};

use super::types::{Episode, RECountQuad, RELevel};

/// Threshold on one count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    AtLeast(u32),
    Exactly(u32),
}

impl Bound {
    pub fn admits(self, n: u32) -> bool {
        match self {
            Bound::AtLeast(k) => n >= k,
            Bound::Exactly(k) => n == k,
        }
    }
}

/// Bounds for (context explicit, context implicit, instruction explicit,
/// instruction implicit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRule(pub [Bound; 4]);

impl RowRule {
    pub fn admits(&self, q: RECountQuad) -> bool {
        let n = [q.ctx_explicit, q.ctx_implicit, q.ins_explicit, q.ins_implicit];
        self.0.iter().zip(n).all(|(b, n)| b.admits(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRules {
    pub explicit: RowRule,
    pub mixed: RowRule,
    pub implicit: RowRule,
}

use Bound::{AtLeast, Exactly};

impl FilterRules {
    /// Reference thresholds, one row per level.
    pub const fn printed() -> Self {
        FilterRules {
            explicit: RowRule([AtLeast(3), AtLeast(1), Exactly(0), Exactly(0)]),
            mixed: RowRule([AtLeast(3), Exactly(0), Exactly(0), AtLeast(1)]),
            implicit: RowRule([AtLeast(1), Exactly(0), AtLeast(2), AtLeast(1)]),
        }
    }

    /// [`FilterRules::printed`] with the middle columns of the Explicit and
    /// Implicit rows exchanged, which agrees with the RE-level definitions.
    /// Used by the generator.
    pub const fn swapped() -> Self {
        FilterRules {
            explicit: RowRule([AtLeast(3), Exactly(0), AtLeast(1), Exactly(0)]),
            mixed: RowRule([AtLeast(3), Exactly(0), Exactly(0), AtLeast(1)]),
            implicit: RowRule([AtLeast(1), AtLeast(2), Exactly(0), AtLeast(1)]),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "printed" => Some(Self::printed()),
            "swapped" => Some(Self::swapped()),
            _ => None,
        }
    }

    pub fn row(&self, level: RELevel) -> &RowRule {
        match level {
            RELevel::Explicit => &self.explicit,
            RELevel::Mixed => &self.mixed,
            RELevel::Implicit => &self.implicit,
        }
    }
}

impl Default for FilterRules {
    fn default() -> Self {
        Self::printed()
    }
}

pub fn count_res(ep: &Episode) -> RECountQuad {
    let mut q = RECountQuad::default();
    for a in ep.context.turns.iter().flat_map(|t| &t.re_annotations) {
        if a.form.is_explicit() {
            q.ctx_explicit += 1;
        } else {
            q.ctx_implicit += 1;
        }
    }
    for a in &ep.instruction.re_annotations {
        if a.form.is_explicit() {
            q.ins_explicit += 1;
        } else {
            q.ins_implicit += 1;
        }
    }
    q
}

pub fn filter_episode(quad: RECountQuad, level: RELevel, rules: &FilterRules) -> bool {
    rules.row(level).admits(quad)
}
