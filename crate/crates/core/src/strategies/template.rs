use std::collections::BTreeSet;
use std::sync::OnceLock;

use regex::Regex;

use super::StrategyError;

/// A prompt text with `{name}` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: &'static str,
    pub text: &'static str,
}

fn slot_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"\{([a-z_]+)\}").unwrap())
}

impl PromptTemplate {
    pub const fn new(name: &'static str, text: &'static str) -> Self {
        PromptTemplate { name, text }
    }

    pub fn placeholders(&self) -> BTreeSet<&'static str> {
        slot_re()
            .captures_iter(self.text)
            .map(|c| c.get(1).unwrap().as_str())
            .collect()
    }

    /// Fills every slot in one pass; values are not rescanned. Fails when a
    /// slot has no binding.
    pub fn render(&self, bindings: &[(&str, &str)]) -> Result<String, StrategyError> {
        let mut missing = None;
        let out = slot_re().replace_all(self.text, |c: &regex::Captures<'_>| {
            let key = &c[1];
            match bindings.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => v.to_string(),
                None => {
                    missing.get_or_insert_with(|| key.to_string());
                    String::new()
                }
            }
        });
        match missing {
            Some(slot) => Err(StrategyError::Unbound {
                template: self.name,
                slot,
            }),
            None => Ok(out.into_owned()),
        }
    }
}

pub const T_PLAN: PromptTemplate = PromptTemplate::new("T_plan", include_str!("../../assets/prompts/plan.txt"));
pub const T_AP: PromptTemplate = PromptTemplate::new("T_AP", include_str!("../../assets/prompts/aware.txt"));
pub const T_COT: PromptTemplate = PromptTemplate::new("T_CoT", include_str!("../../assets/prompts/cot.txt"));
pub const T_ICL: PromptTemplate = PromptTemplate::new("T_ICL", include_str!("../../assets/prompts/icl.txt"));
pub const T_TOCC: PromptTemplate = PromptTemplate::new("T_TOCC", include_str!("../../assets/prompts/tocc.txt"));
pub const T_LLMP: PromptTemplate = PromptTemplate::new("T_LLMP", include_str!("../../assets/prompts/llmp.txt"));
