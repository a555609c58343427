//! Context expansion: a seed instruction becomes six dialogue rounds plus a
//! final human instruction.

use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;
use std::sync::OnceLock;

use crate::gateway::{ChatMessage, Limits, Provider};
use crate::world::kinds::ObjectKind;
use crate::world::{SceneSpec, TaskKind};

use super::annotate::{annotate, Referent};
use super::seeds::SeedInstruction;
use super::text::{capitalize, decapitalize, indefinite_article, word_count};
use super::types::{ContextMemory, DialogueTurn, Speaker};
use super::{templates, DatasetError};

pub const ROUNDS: usize = 6;
pub const MIN_WORDS: usize = 20;

/// Which engine produces text for a pipeline stage.
#[derive(Clone, Copy)]
pub enum Generator<'a> {
    Deterministic,
    Llm(&'a dyn Provider),
}

/// Objects a seed's dialogue talks about.
#[derive(Debug, Clone)]
pub struct Cast {
    pub target: (String, &'static ObjectKind),
    /// Carrier or light, when the task has one.
    pub secondary: Option<(String, &'static ObjectKind)>,
    /// Another pickupable mentioned once at the end of the context and never
    /// annotated.
    pub distractor: Option<(String, &'static ObjectKind)>,
}

impl Cast {
    pub fn referents(&self) -> Vec<Referent<'_>> {
        let mut v = vec![Referent {
            id: &self.target.0,
            kind: self.target.1,
        }];
        if let Some((id, kind)) = &self.secondary {
            v.push(Referent { id, kind });
        }
        v
    }
}

fn kind_of(scene: &SceneSpec, id: &str) -> Result<&'static ObjectKind, DatasetError> {
    let o = scene
        .objects
        .iter()
        .find(|o| o.id == id)
        .ok_or_else(|| DatasetError::Structure(format!("scene {} has no object `{id}`", scene.scene_id)))?;
    crate::world::kinds::kind_by_name(&o.kind).ok_or_else(|| DatasetError::Structure(format!("unknown kind {}", o.kind)))
}

/// Picks referents and a distractor that shares the target's descriptor
/// when the scene has one.
pub fn cast_for(seed: &SeedInstruction, scene: &SceneSpec) -> Result<Cast, DatasetError> {
    let target_id = seed.goal.target();
    let target = (target_id.to_string(), kind_of(scene, target_id)?);
    let secondary = match seed.goal.carrier().or(seed.goal.light()) {
        Some(id) => Some((id.to_string(), kind_of(scene, id)?)),
        None => None,
    };
    let used: Vec<&str> = seed.goal.object_ids();
    let mut others: Vec<(String, &'static ObjectKind)> = Vec::new();
    for o in &scene.objects {
        let k = kind_of(scene, &o.id)?;
        if !used.contains(&o.id.as_str())
            && k.has(crate::world::Properties::PICKUPABLE)
            && k.name != target.1.name
            && secondary.as_ref().is_none_or(|s| s.1.name != k.name)
        {
            others.push((o.id.clone(), k));
        }
    }
    others.sort_by(|a, b| a.0.cmp(&b.0));
    let want = super::lexicon::descriptor(target.1.name);
    let distractor = others
        .iter()
        .find(|(_, k)| super::lexicon::descriptor(k.name) == want)
        .or(others.first())
        .cloned();
    Ok(Cast {
        target,
        secondary,
        distractor,
    })
}

fn slot_regex() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"\{(the|The|this|This|our|Our|a|A|pl|Pl):(t|s|d)\}").unwrap())
}

fn render_sentence(tpl: &str, cast: &Cast) -> String {
    slot_regex()
        .replace_all(tpl, |c: &regex::Captures<'_>| {
            let kind = match &c[2] {
                "t" => cast.target.1,
                "s" => cast.secondary.as_ref().expect("secondary slot needs a secondary").1,
                _ => cast.distractor.as_ref().expect("distractor slot needs a distractor").1,
            };
            let det = &c[1];
            let phrase = match det.to_ascii_lowercase().as_str() {
                "pl" => kind.plural.to_string(),
                "a" => format!("{} {}", indefinite_article(kind.noun), kind.noun),
                d => format!("{d} {}", kind.noun),
            };
            if det.starts_with(|ch: char| ch.is_ascii_uppercase()) {
                capitalize(&phrase)
            } else {
                phrase
            }
        })
        .into_owned()
}

fn render_turn(sentences: &[&str], cast: &Cast) -> String {
    let has_secondary = cast.secondary.is_some();
    sentences
        .iter()
        .filter_map(|s| match s.split_once('|') {
            Some(("S", rest)) => has_secondary.then_some(rest),
            Some(("N", rest)) => (!has_secondary).then_some(rest),
            _ => Some(*s),
        })
        .map(|s| render_sentence(s, cast))
        .collect::<Vec<_>>()
        .join(" ")
}

fn annotated(speaker: Speaker, text: String, cast: &Cast) -> DialogueTurn {
    let re_annotations = annotate(&text, &cast.referents());
    DialogueTurn {
        speaker,
        text,
        re_annotations,
    }
}

/// Gerund phrase naming the task activity; carries the task-type keyword the
/// instruction needs once its object mentions are replaced.
fn activity<R: Rng>(kind: TaskKind, rng: &mut R) -> &'static str {
    templates::ACTIVITIES
        .iter()
        .find(|(k, _)| *k == kind)
        .map(|(_, v)| *v.choose(rng).expect("non-empty"))
        .expect("every task kind has activities")
}

pub fn instruction_text<R: Rng>(seed: &SeedInstruction, cast: &Cast, rng: &mut R) -> String {
    let opener = templates::OPENERS.choose(rng).expect("non-empty");
    let act = activity(seed.goal.kind(), rng);
    let request = decapitalize(seed.text.trim_end_matches('.'));
    format!(
        "{opener} Let's get started with {act} the {}. After that, I'll need you to {request}.",
        cast.target.1.noun
    )
}

/// Deterministic engine: fills the six-round templates.
pub fn expand_deterministic<R: Rng>(
    seed: &SeedInstruction,
    cast: &Cast,
    rng: &mut R,
) -> (ContextMemory, DialogueTurn) {
    let mut turns = Vec::with_capacity(ROUNDS * 2);
    for (round, (human, robot)) in templates::ROUNDS.iter().enumerate() {
        let h = human.choose(rng).expect("non-empty");
        turns.push(annotated(Speaker::Human, render_turn(h, cast), cast));
        let r = robot.choose(rng).expect("non-empty");
        let mut text = render_turn(r, cast);
        if round + 1 == ROUNDS && cast.distractor.is_some() {
            let d = templates::DISTRACTOR.choose(rng).expect("non-empty");
            text.push(' ');
            text.push_str(&render_sentence(d, cast));
        }
        turns.push(annotated(Speaker::Robot, text, cast));
    }
    let instruction = annotated(Speaker::Human, instruction_text(seed, cast, rng), cast);
    (ContextMemory { turns }, instruction)
}

/// Splits `Human: ...` / `Robot: ...` lines. `Alice` is accepted for the
/// human speaker.
pub fn parse_dialogue(text: &str) -> Result<Vec<(Speaker, String)>, DatasetError> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let line = line.trim_start_matches("**");
        let (who, what) = line
            .split_once(':')
            .ok_or_else(|| DatasetError::Structure(format!("line without speaker: `{line}`")))?;
        let speaker = match who.trim().trim_matches('*').to_ascii_lowercase().as_str() {
            "human" | "alice" => Speaker::Human,
            "robot" => Speaker::Robot,
            other => return Err(DatasetError::Structure(format!("unknown speaker `{other}`"))),
        };
        out.push((speaker, what.trim().trim_matches('*').trim().to_string()));
    }
    Ok(out)
}

/// Structural checks shared by LLM-produced dialogues: alternating speakers
/// starting with the human, the expected number of turns, and the final
/// human request.
pub fn validate_dialogue(lines: &[(Speaker, String)], turns: usize) -> Result<(), DatasetError> {
    if lines.len() != turns {
        return Err(DatasetError::Structure(format!(
            "expected {turns} lines ({} rounds plus the request), got {}",
            (turns - 1) / 2,
            lines.len()
        )));
    }
    for (i, (s, _)) in lines.iter().enumerate() {
        let want = if i % 2 == 0 { Speaker::Human } else { Speaker::Robot };
        if *s != want {
            return Err(DatasetError::Structure(format!("line {} should be spoken by {}", i + 1, want.label())));
        }
    }
    Ok(())
}

pub const EXPAND_PROMPT: &str = include_str!("../../assets/prompts/expand.txt");
pub const EXPAND_EXAMPLE: &str = include_str!("../../assets/prompts/expand_example.txt");

fn fill(template: &str, pairs: &[(&str, &str)]) -> String {
    let mut s = template.to_string();
    for (k, v) in pairs {
        s = s.replace(&format!("{{{k}}}"), v);
    }
    s
}

/// LLM engine: one call with the expansion prompt, then structural
/// validation and annotation.
pub fn expand_llm(
    seed: &SeedInstruction,
    scene: &SceneSpec,
    res: &[String],
    cast: &Cast,
    provider: &dyn Provider,
) -> Result<(ContextMemory, DialogueTurn), DatasetError> {
    let mut items: Vec<&str> = scene.objects.iter().map(|o| o.kind.as_str()).collect();
    items.extend(scene.receptacles.iter().map(|r| r.kind.as_str()));
    items.sort();
    items.dedup();
    let prompt = fill(
        EXPAND_PROMPT,
        &[
            ("seed", &seed.text),
            ("items", &items.join(", ")),
            ("res", &res.join(", ")),
            ("example", EXPAND_EXAMPLE.trim_end()),
        ],
    );
    let reply = provider.complete(&[ChatMessage::user(prompt)], &Limits::generation())?;
    let lines = parse_dialogue(&reply.text)?;
    validate_dialogue(&lines, ROUNDS * 2 + 1)?;
    for (i, (_, t)) in lines.iter().take(ROUNDS * 2).enumerate() {
        if word_count(t) < MIN_WORDS {
            return Err(DatasetError::Structure(format!("line {} has fewer than {MIN_WORDS} words", i + 1)));
        }
    }
    let last = &lines[ROUNDS * 2].1;
    let request = seed.text.trim_end_matches('.').to_ascii_lowercase();
    if !last.to_ascii_lowercase().contains(&request) {
        return Err(DatasetError::Structure("final line does not contain the request".into()));
    }
    let mut turns: Vec<DialogueTurn> = lines
        .into_iter()
        .map(|(s, t)| annotated(s, t, cast))
        .collect();
    let instruction = turns.pop().expect("validated length");
    Ok((ContextMemory { turns }, instruction))
}

pub fn expand_context<R: Rng>(
    seed: &SeedInstruction,
    scene: &SceneSpec,
    res: &[String],
    generator: Generator<'_>,
    rng: &mut R,
) -> Result<(ContextMemory, DialogueTurn), DatasetError> {
    if res.is_empty() {
        return Err(DatasetError::NoMentions(seed.text.clone()));
    }
    let cast = cast_for(seed, scene)?;
    match generator {
        Generator::Deterministic => Ok(expand_deterministic(seed, &cast, rng)),
        Generator::Llm(p) => expand_llm(seed, scene, res, &cast, p),
    }
}
