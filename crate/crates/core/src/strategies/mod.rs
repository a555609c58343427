//! Prompting strategies layered over the planners.
//!
//! A strategy shapes the planner's input in two places: [`prepare`] runs
//! once per episode (the TOCC rewrite call, dropping the context) and
//! [`wrap_prompt`] decorates every planning prompt (awareness preamble,
//! reasoning frame, demonstrations).

pub mod gate;
pub mod listing;
mod template;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Episode;
use crate::gateway::{ChatMessage, Limits, Provider, Usage};

pub use gate::{gate_implicit_re, Gate, GateRule};
pub use listing::{parse_scene_listing, render_scene};
pub use template::{PromptTemplate, T_AP, T_COT, T_ICL, T_LLMP, T_PLAN, T_TOCC};

/// Stand-in for an empty section.
pub const EMPTY_SECTION: &str = "(none)";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("template {template} has no binding for `{{{slot}}}`")]
    Unbound { template: &'static str, slot: String },
    #[error("unknown strategy `{0}` (expected none, ap, gated-ap, cot, icl, tocc or no-context)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    None,
    Ap,
    GatedAp,
    Cot,
    Icl,
    Tocc,
    NoContext,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::None,
        StrategyKind::Ap,
        StrategyKind::GatedAp,
        StrategyKind::Cot,
        StrategyKind::Icl,
        StrategyKind::Tocc,
        StrategyKind::NoContext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::None => "none",
            StrategyKind::Ap => "ap",
            StrategyKind::GatedAp => "gated-ap",
            StrategyKind::Cot => "cot",
            StrategyKind::Icl => "icl",
            StrategyKind::Tocc => "tocc",
            StrategyKind::NoContext => "no-context",
        }
    }

    /// Column label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::None => "Vanilla",
            StrategyKind::Ap => "AP",
            StrategyKind::GatedAp => "Gated AP",
            StrategyKind::Cot => "CoT",
            StrategyKind::Icl => "ICL",
            StrategyKind::Tocc => "TOCC",
            StrategyKind::NoContext => "No context",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, StrategyError> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| StrategyError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// TOCC variant that plans from the rewritten instruction alone.
    #[serde(default)]
    pub tocc_instruction_only: bool,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        StrategyConfig {
            kind,
            tocc_instruction_only: false,
        }
    }
}

/// Outcome of the TOCC rewrite call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewrite {
    pub text: String,
    /// The reply was empty or the call failed; the original instruction
    /// was kept.
    pub fallback: bool,
    pub usage: Usage,
    pub error: Option<String>,
}

/// What the planner reads for one episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningInput {
    pub scene: String,
    pub context: String,
    pub instruction: String,
    pub rewrite: Option<Rewrite>,
}

/// Runs the per-episode part of a strategy.
pub fn prepare(cfg: StrategyConfig, episode: &Episode, provider: &dyn Provider) -> Result<PlanningInput, StrategyError> {
    let scene = render_scene(&episode.scene);
    let rendered = episode.context.render();
    let context = if rendered.trim().is_empty() || cfg.kind == StrategyKind::NoContext {
        EMPTY_SECTION.to_string()
    } else {
        rendered
    };
    let original = episode.instruction.text.clone();
    if cfg.kind != StrategyKind::Tocc {
        return Ok(PlanningInput {
            scene,
            context,
            instruction: original,
            rewrite: None,
        });
    }
    let rewrite = tocc_rewrite(provider, &context, &original)?;
    Ok(PlanningInput {
        scene,
        context: if cfg.tocc_instruction_only { EMPTY_SECTION.to_string() } else { context },
        instruction: rewrite.text.clone(),
        rewrite: Some(rewrite),
    })
}

/// One rewrite call; an empty reply or a failed call keeps `instruction`.
pub fn tocc_rewrite(provider: &dyn Provider, context: &str, instruction: &str) -> Result<Rewrite, StrategyError> {
    let prompt = T_TOCC.render(&[("context", context), ("instruction", instruction)])?;
    let mut usage = Usage::default();
    let (reply, error) = match provider.complete(&[ChatMessage::user(prompt)], &Limits::default()) {
        Ok(r) => {
            usage.record(&r);
            (r.text.trim().to_string(), None)
        }
        Err(e) => (String::new(), Some(e.to_string())),
    };
    let fallback = reply.is_empty();
    Ok(Rewrite {
        text: if fallback { instruction.to_string() } else { reply },
        fallback,
        usage,
        error,
    })
}

/// Decorates a rendered planning prompt. `instruction` is what the planner
/// was given; the gate reads it.
pub fn wrap_prompt(kind: StrategyKind, instruction: &str, body: String) -> Result<String, StrategyError> {
    let preamble = |t: &PromptTemplate| format!("{}\n\n{}", t.text.trim_end(), body);
    Ok(match kind {
        StrategyKind::None | StrategyKind::Tocc | StrategyKind::NoContext => body,
        StrategyKind::Ap => preamble(&T_AP),
        StrategyKind::GatedAp if gate_implicit_re(instruction) => preamble(&T_AP),
        StrategyKind::GatedAp => body,
        StrategyKind::Cot => T_COT.render(&[("body", body.trim_end())])?,
        StrategyKind::Icl => preamble(&T_ICL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.as_str().parse::<StrategyKind>(), Ok(k));
        }
        assert_eq!("Gated_AP".parse::<StrategyKind>(), Ok(StrategyKind::GatedAp));
        assert!("magic".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn gated_ap_is_vanilla_when_gate_is_quiet() {
        let body = "Human Pending Instruction: Put the apple in the cabinet.".to_string();
        let plain = wrap_prompt(StrategyKind::None, "Put the apple in the cabinet.", body.clone()).unwrap();
        let gated = wrap_prompt(StrategyKind::GatedAp, "Put the apple in the cabinet.", body.clone()).unwrap();
        assert_eq!(plain, gated);
        let gated = wrap_prompt(StrategyKind::GatedAp, "Put it in the cabinet.", body.clone()).unwrap();
        assert_eq!(gated, wrap_prompt(StrategyKind::Ap, "", body).unwrap());
    }

    #[test]
    fn cot_wraps_body() {
        let out = wrap_prompt(StrategyKind::Cot, "x", "BODY".to_string()).unwrap();
        let at = out.find("BODY").unwrap();
        assert!(at > 0 && at < out.len() - 4);
    }
}
