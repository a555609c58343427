//! Rule-based reading of planning prompts.
//!
//! The prompt is scanned for the section headers used by the bundled
//! templates; when a header repeats (demonstrations, wrapped bodies) the last
//! occurrence wins.

use std::sync::OnceLock;

use regex::Regex;

use super::ScriptedMode;
use crate::dataset::lexicon::{adjective, kinds_with_descriptor};
use crate::dataset::text::{find_words, is_sentence_start};
use crate::planners::lower::lower_task;
use crate::planners::nl::{nl_to_step, step_to_nl};
use crate::planners::{solve, DomainModel, DEFAULT_SEARCH_BUDGET};
use crate::strategies::listing::parse_scene_listing;
use crate::world::kinds::{kind_by_name, kinds_for_surface, ObjectKind, VOCABULARY};
use crate::world::{check_goal, load_scene, Category, Properties, SceneSpec, SkillAction, TaskGoal, TaskKind};

pub(super) const TOCC_MARKER: &str = "only output the clear instructions";
pub(super) const LLMP_MARKER: &str = "Complete the problem";
pub(super) const UNSURE: &str = "I am not sure what you would like me to do.";

#[derive(Debug, Default)]
struct Sections {
    scene: Option<String>,
    context: Vec<String>,
    instruction: Option<String>,
    history: Vec<String>,
    options: Vec<(String, String)>,
}

fn option_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^\(([a-z]+)\) (.+)$").unwrap())
}

fn turn_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^[A-Z][a-z]*: ").unwrap())
}

fn following<'a>(lines: &[&'a str], from: usize, keep: impl Fn(&str) -> bool) -> Vec<&'a str> {
    lines[from..]
        .iter()
        .map(|l| l.trim())
        .skip_while(|l| l.is_empty())
        .take_while(|l| keep(l))
        .collect()
}

fn sections(text: &str) -> Sections {
    let lines: Vec<&str> = text.lines().collect();
    let mut s = Sections::default();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if line == "Scene:" {
            s.scene = Some(following(&lines, i + 1, |l| l.starts_with("- ")).join("\n"));
        } else if line == "Context Memory:" {
            s.context = following(&lines, i + 1, |l| turn_re().is_match(l))
                .into_iter()
                .map(|l| l.split_once(": ").map_or(l, |(_, t)| t).to_string())
                .collect();
        } else if let Some(rest) = line.strip_prefix("Human Pending Instruction:") {
            s.instruction = Some(rest.trim().to_string());
        } else if line == "Executed Steps:" {
            s.history = following(&lines, i + 1, |l| !l.is_empty() && l != "(none)")
                .into_iter()
                .map(str::to_string)
                .collect();
        } else if line == "Options:" {
            s.options = following(&lines, i + 1, |l| option_re().is_match(l))
                .into_iter()
                .map(|l| {
                    let c = option_re().captures(l).unwrap();
                    (c[1].to_string(), c[2].to_string())
                })
                .collect();
        }
    }
    s
}

/// Role a noun phrase plays in the request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Target,
    Carrier,
    Light,
    Destination,
}

#[derive(Debug, Clone, PartialEq)]
enum Np {
    Named(Vec<&'static ObjectKind>),
    Descriptor(Vec<&'static ObjectKind>),
    /// Pronouns and state phrases: any portable object.
    Vague,
}

const DETERMINERS: &[&str] = &["a", "an", "the", "this", "that", "these", "those", "our", "my", "your", "some"];
const VAGUE_HEADS: &[&str] = &["it", "them", "they", "one", "ones", "thing", "things"];

fn parse_np(text: &str) -> Option<Np> {
    let lower = text.trim().trim_end_matches(['.', ',', '!', '?']).to_ascii_lowercase();
    let mut words: Vec<&str> = lower.split_whitespace().collect();
    while words.len() > 1 && DETERMINERS.contains(&words[0]) {
        words.remove(0);
    }
    while words.len() > 1 && adjective(words[0]).is_some() {
        words.remove(0);
    }
    let head = words.join(" ");
    let named = kinds_for_surface(&head);
    if !named.is_empty() {
        return Some(Np::Named(named));
    }
    let described = kinds_with_descriptor(&head);
    if !described.is_empty() {
        return Some(Np::Descriptor(described));
    }
    VAGUE_HEADS.contains(&head.as_str()).then_some(Np::Vague)
}

#[derive(Debug, Clone)]
enum Frame {
    Place { target: String, dest: String },
    Stack { target: String, carrier: String, dest: String },
    Examine { target: String, light: String },
}

fn frames() -> &'static [Regex; 3] {
    static R: OnceLock<[Regex; 3]> = OnceLock::new();
    R.get_or_init(|| {
        [
            Regex::new(r"(?:examine|inspect|look at) (.+?) (?:under|by|with) (.+)$").unwrap(),
            Regex::new(r"put (.+?) (?:in|into) (.+?),? then put (.+?) (?:onto|into|on|in) (.+)$").unwrap(),
            Regex::new(r"^put (.+?) (?:onto|into|on|in) (.+)$").unwrap(),
        ]
    })
}

fn request_of(instruction: &str) -> String {
    let lower = instruction.to_ascii_lowercase();
    let req = match lower.rfind("need you to ") {
        Some(i) => &lower[i + "need you to ".len()..],
        None => &lower[..],
    };
    req.trim().trim_end_matches(['.', '!']).trim().to_string()
}

fn parse_frame(instruction: &str) -> Option<Frame> {
    let req = request_of(instruction);
    let [examine, stack, place] = frames();
    if let Some(c) = examine.captures(&req) {
        return Some(Frame::Examine {
            target: c[1].to_string(),
            light: c[2].to_string(),
        });
    }
    if let Some(c) = stack.captures(&req) {
        return Some(Frame::Stack {
            target: c[1].to_string(),
            carrier: c[2].to_string(),
            dest: c[4].to_string(),
        });
    }
    let last_put = req.rfind("put ").filter(|&i| i == 0 || !req.as_bytes()[i - 1].is_ascii_alphabetic())?;
    let c = place.captures(&req[last_put..])?;
    Some(Frame::Place {
        target: c[1].to_string(),
        dest: c[2].to_string(),
    })
}

fn kind_keyword(instruction: &str) -> TaskKind {
    static R: OnceLock<[Regex; 3]> = OnceLock::new();
    let [heat, cool, clean] = R.get_or_init(|| {
        [
            Regex::new(r"(?i)\b(cook|heat|warm)").unwrap(),
            Regex::new(r"(?i)\b(chill|cool|cold)").unwrap(),
            Regex::new(r"(?i)\b(clean|rins|wash)").unwrap(),
        ]
    });
    if heat.is_match(instruction) {
        TaskKind::HeatPlace
    } else if cool.is_match(instruction) {
        TaskKind::CoolPlace
    } else if clean.is_match(instruction) {
        TaskKind::CleanPlace
    } else {
        TaskKind::PickPlace
    }
}

/// Something a noun phrase can resolve to: a scene entity, or a bare kind
/// when no scene is given.
#[derive(Debug, Clone, PartialEq)]
struct Entity {
    id: String,
    kind: &'static ObjectKind,
}

fn fits(role: Role, k: &ObjectKind) -> bool {
    match role {
        Role::Target => k.has(Properties::PICKUPABLE),
        Role::Carrier => k.category == Category::Container,
        Role::Light => k.category == Category::Light,
        Role::Destination => k.is_receptacle(),
    }
}

fn universe(scene: Option<&SceneSpec>, role: Role) -> Vec<Entity> {
    let mut out: Vec<Entity> = match scene {
        Some(s) => {
            let objs = s.objects.iter().map(|o| (&o.id, &o.kind));
            let recs = s.receptacles.iter().map(|r| (&r.id, &r.kind));
            objs.chain(recs)
                .filter_map(|(id, k)| kind_by_name(k).map(|kind| Entity { id: id.clone(), kind }))
                .collect()
        }
        None => VOCABULARY
            .iter()
            .map(|kind| Entity {
                id: kind.noun.to_string(),
                kind,
            })
            .collect(),
    };
    out.retain(|e| fits(role, e.kind));
    out
}

fn candidates(np: &Np, scene: Option<&SceneSpec>, role: Role) -> Vec<Entity> {
    let all = universe(scene, role);
    match np {
        Np::Named(kinds) | Np::Descriptor(kinds) => {
            all.into_iter().filter(|e| kinds.iter().any(|k| k.name == e.kind.name)).collect()
        }
        Np::Vague => all,
    }
}

/// Positions `(turn, offset)` of mentions of a kind in the dialogue. With
/// `names` false, capitalized words inside a sentence are taken for proper
/// names and skipped.
fn mentions(context: &[String], kind: &ObjectKind, names: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (t, turn) in context.iter().enumerate() {
        let mut hits: Vec<(usize, usize)> = Vec::new();
        for form in kind.surface_forms() {
            for at in find_words(turn, form) {
                if hits.iter().any(|&(s, e)| at < e && s < at + form.len()) {
                    continue;
                }
                hits.push((at, at + form.len()));
            }
        }
        for (at, _) in hits {
            let upper = turn.as_bytes()[at].is_ascii_uppercase();
            if names || !upper || is_sentence_start(turn, at) {
                out.push((t, at));
            }
        }
    }
    out.sort();
    out
}

fn best_supported(cands: &[Entity], context: &[String]) -> Option<Entity> {
    let mut best: Option<(&Entity, usize, (usize, usize))> = None;
    for e in cands {
        let m = mentions(context, e.kind, false);
        let Some(&first) = m.first() else { continue };
        let better = match best {
            None => true,
            Some((_, n, f)) => m.len() > n || (m.len() == n && first < f),
        };
        if better {
            best = Some((e, m.len(), first));
        }
    }
    best.map(|(e, ..)| e.clone()).or_else(|| cands.first().cloned())
}

fn most_recent(cands: &[Entity], context: &[String]) -> Option<Entity> {
    cands
        .iter()
        .filter_map(|e| mentions(context, e.kind, true).last().map(|&p| (p, e)))
        .max_by_key(|(p, _)| *p)
        .map(|(_, e)| e.clone())
        .or_else(|| cands.first().cloned())
}

/// The request with every participant resolved.
#[derive(Debug, Clone)]
struct Intent {
    kind: TaskKind,
    target: Entity,
    carrier: Option<Entity>,
    light: Option<Entity>,
    dest: Option<Entity>,
}

impl Intent {
    fn goal(&self) -> Option<TaskGoal> {
        let target = self.target.id.clone();
        let dest = || self.dest.as_ref().map(|d| d.id.clone());
        Some(match self.kind {
            TaskKind::ExamineInLight => TaskGoal::ExamineInLight {
                target,
                light: self.light.as_ref()?.id.clone(),
            },
            TaskKind::StackPlace => TaskGoal::StackPlace {
                target,
                carrier: self.carrier.as_ref()?.id.clone(),
                destination: dest()?,
            },
            TaskKind::HeatPlace => TaskGoal::HeatPlace { target, destination: dest()? },
            TaskKind::CoolPlace => TaskGoal::CoolPlace { target, destination: dest()? },
            TaskKind::CleanPlace => TaskGoal::CleanPlace { target, destination: dest()? },
            TaskKind::PickPlace => TaskGoal::PickPlace { target, destination: dest()? },
        })
    }

    /// Canonical explicit rewording.
    fn clear_instruction(&self) -> Option<String> {
        let t = self.target.kind.noun;
        let into = |d: &Entity| {
            let prep = if d.kind.category == Category::Furniture { "on" } else { "in" };
            format!("{prep} the {}", d.kind.noun)
        };
        Some(match self.kind {
            TaskKind::ExamineInLight => format!("Examine the {t} under the {}.", self.light.as_ref()?.kind.noun),
            TaskKind::StackPlace => {
                let c = self.carrier.as_ref()?.kind.noun;
                format!("Put the {t} in the {c}, then put the {c} {}.", into(self.dest.as_ref()?))
            }
            TaskKind::PickPlace => format!("Put the {t} {}.", into(self.dest.as_ref()?)),
            k => {
                let verb = match k {
                    TaskKind::HeatPlace => "Heat",
                    TaskKind::CoolPlace => "Cool",
                    _ => "Clean",
                };
                format!("{verb} the {t}, then put the {t} {}.", into(self.dest.as_ref()?))
            }
        })
    }
}

fn understand(mode: ScriptedMode, instruction: &str, context: &[String], scene: Option<&SceneSpec>) -> Option<Intent> {
    let frame = parse_frame(instruction)?;
    let (kind, slots): (TaskKind, Vec<(Role, &str)>) = match &frame {
        Frame::Place { target, dest } => (
            kind_keyword(instruction),
            vec![(Role::Target, target.as_str()), (Role::Destination, dest.as_str())],
        ),
        Frame::Stack { target, carrier, dest } => (
            TaskKind::StackPlace,
            vec![
                (Role::Target, target.as_str()),
                (Role::Carrier, carrier.as_str()),
                (Role::Destination, dest.as_str()),
            ],
        ),
        Frame::Examine { target, light } => (
            TaskKind::ExamineInLight,
            vec![(Role::Target, target.as_str()), (Role::Light, light.as_str())],
        ),
    };
    let parsed: Vec<(Role, Np)> = slots
        .into_iter()
        .map(|(r, t)| parse_np(t).map(|np| (r, np)))
        .collect::<Option<_>>()?;

    let mut resolved: Vec<(Role, Entity)> = Vec::new();
    // named phrases, then descriptors, then pronouns and state phrases
    for pass in 0..3 {
        for (role, np) in &parsed {
            let rank = match np {
                Np::Named(_) => 0,
                Np::Descriptor(_) => 1,
                Np::Vague => 2,
            };
            if rank != pass {
                continue;
            }
            let mut cands = candidates(np, scene, *role);
            let pick = if rank == 0 {
                cands.first().cloned()
            } else if mode == ScriptedMode::ContextBlind {
                most_recent(&cands, context)
            } else {
                cands.retain(|c| !resolved.iter().any(|(_, e)| e.id == c.id));
                best_supported(&cands, context)
            };
            resolved.push((*role, pick?));
        }
    }
    let get = |r: Role| resolved.iter().find(|(role, _)| *role == r).map(|(_, e)| e.clone());
    Some(Intent {
        kind,
        target: get(Role::Target)?,
        carrier: get(Role::Carrier),
        light: get(Role::Light),
        dest: get(Role::Destination),
    })
}

/// Swaps the target for another portable object, the first by id.
fn omit_target(intent: &mut Intent, scene: &SceneSpec) {
    let taken: Vec<&str> = [&intent.carrier, &intent.light]
        .into_iter()
        .flatten()
        .map(|e| e.id.as_str())
        .chain([intent.target.id.as_str()])
        .collect();
    let mut others: Vec<Entity> = universe(Some(scene), Role::Target)
        .into_iter()
        .filter(|e| !taken.contains(&e.id.as_str()))
        .collect();
    others.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(o) = others.into_iter().next() {
        intent.target = o;
    }
}

fn scene_intent(mode: ScriptedMode, s: &Sections) -> Option<(SceneSpec, Intent)> {
    let scene = parse_scene_listing(s.scene.as_deref()?)?;
    let mut intent = understand(mode, s.instruction.as_deref()?, &s.context, Some(&scene))?;
    if mode == ScriptedMode::OmitObject {
        omit_target(&mut intent, &scene);
    }
    Some((scene, intent))
}

fn rewrite(s: &Sections) -> String {
    let Some(instruction) = s.instruction.as_deref() else {
        return String::new();
    };
    understand(ScriptedMode::PerfectResolution, instruction, &s.context, None)
        .and_then(|i| i.clear_instruction())
        .unwrap_or_else(|| instruction.to_string())
}

fn problem(mode: ScriptedMode, s: &Sections) -> Option<String> {
    let (scene, intent) = scene_intent(mode, s)?;
    let state = load_scene(&scene).ok()?;
    Some(lower_task(&state, &intent.goal()?).to_text())
}

fn next_step(mode: ScriptedMode, s: &Sections) -> Option<SkillAction> {
    let (scene, intent) = scene_intent(mode, s)?;
    let goal = intent.goal()?;
    let mut state = load_scene(&scene).ok()?;
    for line in &s.history {
        let step = nl_to_step(line)?;
        if step == SkillAction::Done {
            return Some(SkillAction::Done);
        }
        state = state.apply_action(&step).ok()?;
    }
    if check_goal(&state, &goal).ok()? {
        return Some(SkillAction::Done);
    }
    let plan = solve(DomainModel::household(), &lower_task(&state, &goal), DEFAULT_SEARCH_BUDGET)?;
    plan.steps().first().cloned()
}

fn choose_option(mode: ScriptedMode, s: &Sections) -> String {
    let step = next_step(mode, s).unwrap_or(SkillAction::Done);
    let want = step_to_nl(&step);
    let done = step_to_nl(&SkillAction::Done);
    let label = s
        .options
        .iter()
        .find(|(_, text)| *text == want)
        .or_else(|| s.options.iter().find(|(_, text)| *text == done))
        .or(s.options.first())
        .map(|(l, _)| l.as_str())
        .unwrap_or("a");
    format!("({label})")
}

pub(super) fn respond(mode: ScriptedMode, prompt: &str) -> String {
    let s = sections(prompt);
    if prompt.contains(TOCC_MARKER) {
        rewrite(&s)
    } else if prompt.contains(LLMP_MARKER) {
        problem(mode, &s).unwrap_or_else(|| UNSURE.to_string())
    } else if !s.options.is_empty() {
        choose_option(mode, &s)
    } else {
        UNSURE.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(lines: &[&str]) -> Vec<String> {
        lines.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn frames_and_kinds() {
        let i = "Great! Let's get started with cooking the fruit. After that, I'll need you to put it into the refrigerator.";
        match parse_frame(i).unwrap() {
            Frame::Place { target, dest } => assert_eq!((target.as_str(), dest.as_str()), ("it", "the refrigerator")),
            f => panic!("{f:?}"),
        }
        assert_eq!(kind_keyword(i), TaskKind::HeatPlace);
        assert!(matches!(
            parse_frame("Put an apple in the bowl, then put the bowl on the counter top").unwrap(),
            Frame::Stack { .. }
        ));
        assert!(matches!(
            parse_frame("Heat the tomato, then put the tomato in the fridge.").unwrap(),
            Frame::Place { .. }
        ));
        assert!(parse_frame("Dance for me.").is_none());
    }

    #[test]
    fn noun_phrases() {
        assert!(matches!(parse_np("a cooked tomato"), Some(Np::Named(k)) if k[0].name == "Tomato"));
        assert!(matches!(parse_np("the reading material"), Some(Np::Descriptor(_))));
        assert_eq!(parse_np("the heated one"), Some(Np::Vague));
        assert_eq!(parse_np("them"), Some(Np::Vague));
        assert_eq!(parse_np("the gizmo"), None);
    }

    #[test]
    fn resolution_modes() {
        let context = ctx(&[
            "I want to cook the tomato tonight, Tomato Express sells good ones.",
            "Sure. I also noticed an apple nearby.",
        ]);
        let i = "Let's start with cooking the fruit. After that, I'll need you to put it on the counter top.";
        let perfect = understand(ScriptedMode::PerfectResolution, i, &context, None).unwrap();
        assert_eq!(perfect.target.id, "tomato");
        assert_eq!(perfect.clear_instruction().unwrap(), "Heat the tomato, then put the tomato on the counter top.");
        let blind = understand(ScriptedMode::ContextBlind, i, &context, None).unwrap();
        assert_eq!(blind.target.id, "apple");
    }

    #[test]
    fn capitalized_names_are_not_mentions() {
        let context = ctx(&["Yesterday Apple released a phone. The tomato is ripe."]);
        let apple = kind_by_name("Apple").unwrap();
        assert!(mentions(&context, apple, false).is_empty());
        assert_eq!(mentions(&context, apple, true).len(), 1);
        assert_eq!(mentions(&ctx(&["Apples are nice."]), apple, false).len(), 1);
    }

    #[test]
    fn sections_last_occurrence_wins() {
        let p = "Options:\n(a) Go to the Cabinet.\nAnswer: (a)\n\nHuman Pending Instruction: one\nOptions:\n(a) Done.\n(b) Pick up the mug.\n\nReply.";
        let s = sections(p);
        assert_eq!(s.options.len(), 2);
        assert_eq!(s.instruction.as_deref(), Some("one"));
    }
}
