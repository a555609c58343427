//! Replacement of explicit referring expressions by implicit ones.

use rand::Rng;
use regex::Regex;

use crate::gateway::{ChatMessage, Limits, Provider};
use crate::world::kinds::kind_by_name;

use super::expand::{parse_dialogue, validate_dialogue, Generator};
use super::lexicon::{adjective, descriptor, descriptor_phrases, state_phrase};
use super::text::capitalize;
use super::types::{Annotation, DialogueTurn, Episode, REForm, RELevel};
use super::DatasetError;

pub const REPLACE_PROMPT: &str = include_str!("../../assets/prompts/replace.txt");
pub const REPLACE_EXAMPLE: &str = include_str!("../../assets/prompts/replace_example.txt");

/// Chance that a later context mention of the target becomes a descriptor
/// rather than a pronoun.
const CONTEXT_DESCRIPTOR_P: f64 = 0.25;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Place {
    /// First target mention in the instruction.
    InstructionFirst,
    Instruction,
    Context,
}

fn kind_of_referent(ep: &Episode, id: &str) -> Option<&'static crate::world::ObjectKind> {
    ep.scene
        .objects
        .iter()
        .find(|o| o.id == id)
        .and_then(|o| kind_by_name(&o.kind))
}

fn implicit_for<R: Rng>(
    ep: &Episode,
    a: &Annotation,
    place: Place,
    rng: &mut R,
) -> Result<(String, REForm), DatasetError> {
    let kind = kind_of_referent(ep, &a.referent)
        .ok_or_else(|| DatasetError::Structure(format!("annotation names unknown object `{}`", a.referent)))?;
    let desc = descriptor(kind.name).ok_or(DatasetError::NoLexiconEntry(kind.name.to_string()))?;
    let descriptive = format!("the {desc}");
    let upper = a.surface.starts_with(|c: char| c.is_ascii_uppercase());
    let plural = a.surface.to_ascii_lowercase().ends_with(kind.plural) && kind.plural != kind.noun;
    let pronoun = match (plural, upper) {
        (true, true) => "they",
        (true, false) => "them",
        (false, _) => "it",
    };
    let primary = a.referent == ep.goal.target();
    let (text, form) = if !primary {
        (descriptive, REForm::Attributive)
    } else {
        match place {
            Place::InstructionFirst => (descriptive, REForm::Attributive),
            Place::Instruction => {
                let state = a
                    .surface
                    .split_whitespace()
                    .find_map(|w| adjective(w).flatten())
                    .and_then(state_phrase);
                match state {
                    Some(p) if rng.gen_bool(0.5) => (p.to_string(), REForm::Attributive),
                    _ => (pronoun.to_string(), REForm::Pronoun),
                }
            }
            Place::Context => {
                if rng.gen_bool(CONTEXT_DESCRIPTOR_P) {
                    (descriptive, REForm::Attributive)
                } else {
                    (pronoun.to_string(), REForm::Pronoun)
                }
            }
        }
    };
    Ok((if upper { capitalize(&text) } else { text }, form))
}

/// Rewrites the chosen annotations of a turn; other text is untouched.
fn rewrite_turn(turn: &DialogueTurn, replacements: &[(usize, String, REForm)]) -> DialogueTurn {
    let mut text = String::with_capacity(turn.text.len());
    let mut anns = Vec::with_capacity(turn.re_annotations.len());
    let mut cursor = 0;
    for (i, a) in turn.re_annotations.iter().enumerate() {
        text.push_str(&turn.text[cursor..a.start]);
        let start = text.len();
        match replacements.iter().find(|(k, _, _)| *k == i) {
            Some((_, new, form)) => {
                text.push_str(new);
                anns.push(Annotation {
                    start,
                    end: text.len(),
                    surface: new.clone(),
                    form: *form,
                    referent: a.referent.clone(),
                });
            }
            None => {
                text.push_str(&a.surface);
                anns.push(Annotation {
                    start,
                    end: text.len(),
                    ..a.clone()
                });
            }
        }
        cursor = a.end;
    }
    text.push_str(&turn.text[cursor..]);
    DialogueTurn {
        speaker: turn.speaker,
        text,
        re_annotations: anns,
    }
}

fn replace_instruction<R: Rng>(ep: &Episode, rng: &mut R) -> Result<DialogueTurn, DatasetError> {
    let mut reps = Vec::new();
    let mut seen_primary = false;
    for (i, a) in ep.instruction.re_annotations.iter().enumerate() {
        if !a.form.is_explicit() {
            continue;
        }
        let place = if a.referent == ep.goal.target() && !seen_primary {
            seen_primary = true;
            Place::InstructionFirst
        } else {
            Place::Instruction
        };
        let (t, f) = implicit_for(ep, a, place, rng)?;
        reps.push((i, t, f));
    }
    Ok(rewrite_turn(&ep.instruction, &reps))
}

/// Replaces every explicit context mention except the first one of each
/// referent.
fn replace_context<R: Rng>(ep: &Episode, rng: &mut R) -> Result<Vec<DialogueTurn>, DatasetError> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::with_capacity(ep.context.turns.len());
    for turn in &ep.context.turns {
        let mut reps = Vec::new();
        for (i, a) in turn.re_annotations.iter().enumerate() {
            if !a.form.is_explicit() {
                continue;
            }
            if !seen.contains(&a.referent.as_str()) {
                seen.push(&a.referent);
                continue;
            }
            let (t, f) = implicit_for(ep, a, Place::Context, rng)?;
            reps.push((i, t, f));
        }
        out.push(rewrite_turn(turn, &reps));
    }
    Ok(out)
}

pub fn replace_deterministic<R: Rng>(ep: &Episode, level: RELevel, rng: &mut R) -> Result<Episode, DatasetError> {
    let mut out = ep.clone();
    out.cell.level = level;
    if level == RELevel::Explicit {
        return Ok(out);
    }
    out.instruction = replace_instruction(ep, rng)?;
    if level == RELevel::Implicit {
        out.context.turns = replace_context(ep, rng)?;
    }
    Ok(out)
}

/// Marks pronouns, descriptors and state phrases in an instruction the LLM
/// engine rewrote, all pointing at the target.
pub fn annotate_implicit(text: &str, target: &str) -> Vec<Annotation> {
    let descs = descriptor_phrases()
        .iter()
        .map(|d| regex::escape(d))
        .collect::<Vec<_>>()
        .join("|");
    let re = Regex::new(&format!(
        r"(?i)\b(?:(the (?:heated|chilled|clean) one)|(the (?:{descs}))|(it|them|they))\b"
    ))
    .expect("valid pattern");
    re.captures_iter(text)
        .map(|c| {
            let m = c.get(0).expect("whole match");
            Annotation {
                start: m.start(),
                end: m.end(),
                surface: m.as_str().to_string(),
                form: if c.get(3).is_some() { REForm::Pronoun } else { REForm::Attributive },
                referent: target.to_string(),
            }
        })
        .collect()
}

pub fn replace_llm<R: Rng>(
    ep: &Episode,
    level: RELevel,
    seed_text: &str,
    provider: &dyn Provider,
    rng: &mut R,
) -> Result<Episode, DatasetError> {
    let mut out = ep.clone();
    out.cell.level = level;
    if level == RELevel::Explicit {
        return Ok(out);
    }
    let kind = kind_of_referent(ep, ep.goal.target())
        .ok_or_else(|| DatasetError::Structure("target missing from scene".into()))?;
    let dialogue = format!("{}\nHuman: {}", ep.context.render(), ep.instruction.text);
    let prompt = REPLACE_PROMPT
        .replace("{res}", kind.noun)
        .replace("{seed}", seed_text)
        .replace("{example}", REPLACE_EXAMPLE.trim_end())
        .replace("{dialogue}", &dialogue);
    let reply = provider.complete(&[ChatMessage::user(prompt)], &Limits::generation())?;
    let lines = parse_dialogue(&reply.text)?;
    validate_dialogue(&lines, ep.context.turns.len() + 1)?;
    let last = lines.last().expect("validated length").1.clone();
    if kind.surface_forms().iter().any(|f| !super::text::find_words(&last, f).is_empty()) {
        return Err(DatasetError::Structure(format!("instruction still names the {}", kind.noun)));
    }
    out.instruction = DialogueTurn {
        speaker: ep.instruction.speaker,
        re_annotations: annotate_implicit(&last, ep.goal.target()),
        text: last,
    };
    if level == RELevel::Implicit {
        out.context.turns = replace_context(ep, rng)?;
    }
    Ok(out)
}

pub fn replace_res<R: Rng>(
    ep: &Episode,
    level: RELevel,
    generator: Generator<'_>,
    seed_text: &str,
    rng: &mut R,
) -> Result<Episode, DatasetError> {
    match generator {
        Generator::Deterministic => replace_deterministic(ep, level, rng),
        Generator::Llm(p) => replace_llm(ep, level, seed_text, p, rng),
    }
}
