//! Templated English rendering of plans and its exact inverse.

use std::sync::OnceLock;

use regex::Regex;

use crate::world::{SkillAction, Verb};

pub const EMPTY_PLAN: &str = "No actions required.";

/// One sentence for one step. Ids are kept verbatim so the text parses back.
pub fn step_to_nl(step: &SkillAction) -> String {
    let a = step.args();
    match step {
        SkillAction::GoTo(_) => format!("Go to the {}.", a[0]),
        SkillAction::PickUp(_) => format!("Pick up the {}.", a[0]),
        SkillAction::PutOn(..) => format!("Put the {} on the {}.", a[0], a[1]),
        SkillAction::PutIn(..) => format!("Put the {} in the {}.", a[0], a[1]),
        SkillAction::Open(_) => format!("Open the {}.", a[0]),
        SkillAction::Close(_) => format!("Close the {}.", a[0]),
        SkillAction::ToggleOn(_) => format!("Turn on the {}.", a[0]),
        SkillAction::ToggleOff(_) => format!("Turn off the {}.", a[0]),
        SkillAction::Heat(_) => format!("Heat the {}.", a[0]),
        SkillAction::Cool(_) => format!("Cool the {}.", a[0]),
        SkillAction::Clean(_) => format!("Clean the {}.", a[0]),
        SkillAction::Slice(_) => format!("Slice the {}.", a[0]),
        SkillAction::Done => "Done.".to_string(),
    }
}

pub fn plan_to_nl(steps: &[SkillAction]) -> String {
    if steps.is_empty() {
        return EMPTY_PLAN.to_string();
    }
    steps.iter().map(step_to_nl).collect::<Vec<_>>().join(" ")
}

fn sentence_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(?:(?P<v1>Go to|Pick up|Open|Close|Turn on|Turn off|Heat|Cool|Clean|Slice) the (?P<a>\w+)|Put the (?P<o>\w+) (?P<prep>on|in) the (?P<r>\w+)|(?P<done>Done))\.$",
        )
        .unwrap()
    })
}

/// Parses one sentence produced by [`step_to_nl`].
pub fn nl_to_step(sentence: &str) -> Option<SkillAction> {
    let c = sentence_re().captures(sentence.trim())?;
    if c.name("done").is_some() {
        return Some(SkillAction::Done);
    }
    if let Some(o) = c.name("o") {
        let verb = if &c["prep"] == "on" { Verb::PutOn } else { Verb::PutIn };
        return SkillAction::from_parts(verb, &[o.as_str(), &c["r"]]).ok();
    }
    let verb = match &c["v1"] {
        "Go to" => Verb::GoTo,
        "Pick up" => Verb::PickUp,
        "Open" => Verb::Open,
        "Close" => Verb::Close,
        "Turn on" => Verb::ToggleOn,
        "Turn off" => Verb::ToggleOff,
        "Heat" => Verb::Heat,
        "Cool" => Verb::Cool,
        "Clean" => Verb::Clean,
        _ => Verb::Slice,
    };
    SkillAction::from_parts(verb, &[&c["a"]]).ok()
}

/// Inverse of [`plan_to_nl`]; `None` on any sentence outside the templates.
pub fn nl_to_plan(text: &str) -> Option<Vec<SkillAction>> {
    let text = text.trim();
    if text == EMPTY_PLAN {
        return Some(Vec::new());
    }
    text.split_inclusive('.')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(nl_to_step)
        .collect()
}
