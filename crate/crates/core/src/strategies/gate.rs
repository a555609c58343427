//! Pattern gate deciding whether an instruction carries an implicit RE.

use std::sync::OnceLock;

use regex::Regex;

use crate::world::kinds::VOCABULARY;

pub const GATE_TEXT: &str = include_str!("../../assets/lexicons/gate.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateRule {
    Pronoun,
    Category,
    State,
    Ordinal,
}

#[derive(Debug)]
pub struct Gate {
    rules: Vec<(GateRule, Regex)>,
}

impl Gate {
    /// Reads `rule: regex` lines.
    pub fn parse(text: &str) -> Result<Gate, String> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, pat) = line
                .split_once(':')
                .ok_or_else(|| format!("gate line {}: expected `rule: regex`", i + 1))?;
            let rule = match name.trim() {
                "pronoun" => GateRule::Pronoun,
                "category" => GateRule::Category,
                "state" => GateRule::State,
                "ordinal" => GateRule::Ordinal,
                other => return Err(format!("gate line {}: unknown rule `{other}`", i + 1)),
            };
            let re = Regex::new(&format!("(?i){}", pat.trim())).map_err(|e| format!("gate line {}: {e}", i + 1))?;
            rules.push((rule, re));
        }
        Ok(Gate { rules })
    }

    pub fn bundled() -> &'static Gate {
        static G: OnceLock<Gate> = OnceLock::new();
        G.get_or_init(|| Gate::parse(GATE_TEXT).expect("bundled gate lexicon is valid"))
    }

    /// First rule that fires, if any.
    pub fn matching_rule(&self, instruction: &str) -> Option<GateRule> {
        for (rule, re) in &self.rules {
            for m in re.find_iter(instruction) {
                if *rule == GateRule::Category && followed_by_object_noun(&instruction[m.end()..]) {
                    continue;
                }
                return Some(*rule);
            }
        }
        None
    }
}

/// Whether the text continues with a scene-object noun ("fruit bowl").
fn followed_by_object_noun(rest: &str) -> bool {
    let rest = rest.trim_start().to_ascii_lowercase();
    VOCABULARY.iter().any(|k| {
        k.surface_forms().iter().any(|f| {
            rest.strip_prefix(f)
                .is_some_and(|tail| !tail.starts_with(|c: char| c.is_ascii_alphanumeric()))
        })
    })
}

pub fn gate_implicit_re(instruction: &str) -> bool {
    Gate::bundled().matching_rule(instruction).is_some()
}
