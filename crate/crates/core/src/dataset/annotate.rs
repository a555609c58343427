//! Lexicon-driven referring-expression annotation.

use crate::world::kinds::{ObjectKind, VOCABULARY};

use super::lexicon::adjective;
use super::text::{find_words, is_sentence_start};
use super::types::{Annotation, REForm};
use super::DatasetError;

const DEFINITE: [&str; 8] = ["the", "this", "that", "these", "those", "our", "my", "your"];
const INDEFINITE: [&str; 3] = ["a", "an", "some"];

/// An object the annotator should look for.
#[derive(Debug, Clone, Copy)]
pub struct Referent<'a> {
    pub id: &'a str,
    pub kind: &'static ObjectKind,
}

fn word_before(text: &str, at: usize) -> Option<(usize, &str)> {
    let head = &text[..at];
    let trimmed = head.strip_suffix(' ')?;
    let start = trimmed
        .rfind(|c: char| !c.is_ascii_alphabetic())
        .map(|i| i + 1)
        .unwrap_or(0);
    let w = &trimmed[start..];
    (!w.is_empty()).then_some((start, w))
}

/// Extends a noun match leftwards over adjectives and one determiner.
fn extend_left(text: &str, noun_start: usize) -> (usize, REForm) {
    let mut start = noun_start;
    while let Some((s, w)) = word_before(text, start) {
        if adjective(w).is_some() {
            start = s;
        } else {
            break;
        }
    }
    match word_before(text, start) {
        Some((s, w)) if DEFINITE.contains(&w.to_ascii_lowercase().as_str()) => (s, REForm::Definite),
        Some((s, w)) if INDEFINITE.contains(&w.to_ascii_lowercase().as_str()) => (s, REForm::Indefinite),
        _ => (start, REForm::Proper),
    }
}

/// Whether a capitalized match is part of a name rather than a noun.
fn looks_like_name(text: &str, at: usize) -> bool {
    text.as_bytes()[at].is_ascii_uppercase() && !is_sentence_start(text, at)
}

/// Finds every explicit mention of the referents. Capitalized matches in
/// mid-sentence are treated as names and skipped.
pub fn annotate(text: &str, referents: &[Referent<'_>]) -> Vec<Annotation> {
    let mut found: Vec<Annotation> = Vec::new();
    for r in referents {
        for form in r.kind.surface_forms() {
            for at in find_words(text, form) {
                let end = at + form.len();
                if looks_like_name(text, at) || found.iter().any(|a| at < a.end && a.start < end) {
                    continue;
                }
                let (start, re_form) = extend_left(text, at);
                found.push(Annotation {
                    start,
                    end,
                    surface: text[start..end].to_string(),
                    form: re_form,
                    referent: r.id.to_string(),
                });
            }
        }
    }
    found.sort_by_key(|a| a.start);
    found
}

/// Object mentions in a seed instruction, in textual order.
pub fn identify_res(seed_instruction: &str) -> Result<Vec<String>, DatasetError> {
    if seed_instruction.trim().is_empty() {
        return Err(DatasetError::EmptyInstruction);
    }
    let mut hits: Vec<(usize, usize)> = Vec::new();
    let mut kinds: Vec<&ObjectKind> = VOCABULARY.iter().filter(|k| !k.is_receptacle()).collect();
    kinds.sort_by_key(|k| std::cmp::Reverse(k.noun.len()));
    for k in kinds {
        for form in k.surface_forms() {
            for at in find_words(seed_instruction, form) {
                let end = at + form.len();
                if !hits.iter().any(|&(s, e)| at < e && s < end) {
                    hits.push((at, end));
                }
            }
        }
    }
    hits.sort();
    let mut out: Vec<String> = Vec::new();
    for (s, e) in hits {
        let w = seed_instruction[s..e].to_ascii_lowercase();
        if !out.contains(&w) {
            out.push(w);
        }
    }
    if out.is_empty() {
        return Err(DatasetError::NoMentions(seed_instruction.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::kinds::kind_by_name;

    fn tomato() -> Referent<'static> {
        Referent {
            id: "tomato",
            kind: kind_by_name("Tomato").unwrap(),
        }
    }

    #[test]
    fn forms_and_spans() {
        let t = "Tomatoes are great. I'll need you to put a cooked tomato into the fridge, then slice our tomato.";
        let a = annotate(t, &[tomato()]);
        let got: Vec<_> = a.iter().map(|a| (a.surface.as_str(), a.form)).collect();
        assert_eq!(
            got,
            [
                ("Tomatoes", REForm::Proper),
                ("a cooked tomato", REForm::Indefinite),
                ("our tomato", REForm::Definite)
            ]
        );
        for x in &a {
            assert_eq!(&t[x.start..x.end], x.surface);
        }
    }

    #[test]
    fn names_are_skipped() {
        let t = "I bet Uncle Tomato would love the tomato. Tomato King agrees.";
        let a = annotate(t, &[tomato()]);
        let got: Vec<_> = a.iter().map(|a| a.surface.as_str()).collect();
        // the sentence-initial one cannot be told apart from a noun
        assert_eq!(got, ["the tomato", "Tomato"]);
    }

    #[test]
    fn identify_examples() {
        assert_eq!(identify_res("Place a vase on a coffee table").unwrap(), ["vase"]);
        assert_eq!(identify_res("Pick up a pillow and turn a lamp on").unwrap(), ["pillow", "lamp"]);
        assert_eq!(identify_res("Put the chilled sliced tomato in the microwave").unwrap(), ["tomato"]);
        assert!(matches!(identify_res(""), Err(DatasetError::EmptyInstruction)));
        assert!(identify_res("Go outside").is_err());
    }
}
