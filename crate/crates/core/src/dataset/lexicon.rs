//! Descriptor lexicon and state adjectives.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::world::kinds::{kind_by_name, ObjectKind, VOCABULARY};
use crate::world::StateFlag;

pub const DESCRIPTORS_TEXT: &str = include_str!("../../assets/lexicons/descriptors.txt");

/// Adjectives that may precede a noun inside one referring expression, with
/// the object state they name, if any.
pub const ADJECTIVES: &[(&str, Option<StateFlag>)] = &[
    ("cooked", Some(StateFlag::Heated)),
    ("heated", Some(StateFlag::Heated)),
    ("warm", Some(StateFlag::Heated)),
    ("warmed", Some(StateFlag::Heated)),
    ("chilled", Some(StateFlag::Cooled)),
    ("cold", Some(StateFlag::Cooled)),
    ("cooled", Some(StateFlag::Cooled)),
    ("clean", Some(StateFlag::Cleaned)),
    ("cleaned", Some(StateFlag::Cleaned)),
    ("rinsed", Some(StateFlag::Cleaned)),
    ("washed", Some(StateFlag::Cleaned)),
    ("sliced", Some(StateFlag::Sliced)),
    ("fresh", None),
    ("little", None),
    ("old", None),
    ("new", None),
    ("favorite", None),
];

pub fn adjective(word: &str) -> Option<Option<StateFlag>> {
    let w = word.to_ascii_lowercase();
    ADJECTIVES.iter().find(|(a, _)| *a == w).map(|(_, s)| *s)
}

/// Attributive phrase naming an object by its state ("the heated one").
pub fn state_phrase(flag: StateFlag) -> Option<&'static str> {
    match flag {
        StateFlag::Heated => Some("the heated one"),
        StateFlag::Cooled => Some("the chilled one"),
        StateFlag::Cleaned => Some("the clean one"),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("descriptor lexicon line {line}: {msg}")]
pub struct LexiconError {
    pub line: usize,
    pub msg: String,
}

/// Parses `Kind = phrase` lines; `#` starts a comment.
pub fn parse_descriptors(text: &str) -> Result<BTreeMap<&'static str, String>, LexiconError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| LexiconError { line: i + 1, msg };
        let (kind, phrase) = line.split_once('=').ok_or_else(|| err("expected `Kind = phrase`".into()))?;
        let kind = kind_by_name(kind.trim()).ok_or_else(|| err(format!("unknown kind `{}`", kind.trim())))?;
        let phrase = phrase.trim().to_ascii_lowercase();
        if phrase.is_empty() {
            return Err(err("empty phrase".into()));
        }
        if out.insert(kind.name, phrase).is_some() {
            return Err(err(format!("duplicate entry for {}", kind.name)));
        }
    }
    Ok(out)
}

pub fn descriptors() -> &'static BTreeMap<&'static str, String> {
    static D: OnceLock<BTreeMap<&'static str, String>> = OnceLock::new();
    D.get_or_init(|| parse_descriptors(DESCRIPTORS_TEXT).expect("bundled lexicon is valid"))
}

/// Category phrase for a kind ("fruit" for Tomato).
pub fn descriptor(kind: &str) -> Option<&'static str> {
    descriptors().get(kind).map(String::as_str)
}

/// Kinds sharing a descriptor phrase.
pub fn kinds_with_descriptor(phrase: &str) -> Vec<&'static ObjectKind> {
    let p = phrase.to_ascii_lowercase();
    VOCABULARY
        .iter()
        .filter(|k| descriptor(k.name) == Some(p.as_str()))
        .collect()
}

/// All distinct descriptor phrases, longest first.
pub fn descriptor_phrases() -> Vec<&'static str> {
    let mut v: Vec<&str> = descriptors().values().map(String::as_str).collect();
    v.sort_by_key(|p| (std::cmp::Reverse(p.len()), *p));
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon() {
        assert_eq!(descriptor("Tomato"), Some("fruit"));
        assert_eq!(descriptor("DeskLamp"), Some("light"));
        let fruit: Vec<_> = kinds_with_descriptor("fruit").iter().map(|k| k.name).collect();
        assert_eq!(fruit, ["Apple", "Tomato"]);
        // every pickupable kind and every light has an entry
        for k in VOCABULARY {
            if !k.is_receptacle() {
                assert!(descriptor(k.name).is_some(), "{}", k.name);
            }
        }
    }

    #[test]
    fn malformed_lines_report_position() {
        let e = parse_descriptors("Apple = fruit\nSpaceship = thing\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_descriptors("Apple fruit").is_err());
    }

    #[test]
    fn adjectives_and_states() {
        assert_eq!(adjective("Cooked"), Some(Some(StateFlag::Heated)));
        assert_eq!(adjective("fresh"), Some(None));
        assert_eq!(adjective("tomato"), None);
        assert_eq!(state_phrase(StateFlag::Cooled), Some("the chilled one"));
    }
}
