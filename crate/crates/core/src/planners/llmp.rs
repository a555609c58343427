//! Translate-then-search: the model writes the goal, the solver plans.

use std::sync::OnceLock;

use regex::Regex;

use super::domain::{DomainModel, HOUSEHOLD_DOMAIN};
use super::lower::problem_for;
use super::plan::{Plan, Provenance};
use super::problem::parse_problem;
use super::solve::solve;
use super::PlannerOutput;
use crate::gateway::{ChatMessage, Limits, Provider, Usage};
use crate::strategies::{wrap_prompt, PlanningInput, StrategyError, StrategyKind, T_LLMP};
use crate::world::WorldState;

pub fn llmp_prompt(strategy: StrategyKind, input: &PlanningInput, initial: &WorldState) -> Result<String, StrategyError> {
    let partial = problem_for(initial, Vec::new()).to_text();
    let body = T_LLMP.render(&[
        ("domain", HOUSEHOLD_DOMAIN.trim_end()),
        ("problem", partial.trim_end()),
        ("scene", &input.scene),
        ("context", &input.context),
        ("instruction", &input.instruction),
    ])?;
    wrap_prompt(strategy, &input.instruction, body)
}

fn fence_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"(?s)```[a-z]*\n(.*?)```").unwrap())
}

/// The problem text inside a reply: a fenced block if present, otherwise
/// from the first `(define` on.
pub fn extract_problem(reply: &str) -> &str {
    if let Some(c) = fence_re().captures(reply) {
        return c.get(1).unwrap().as_str();
    }
    match reply.find("(define") {
        Some(i) => &reply[i..],
        None => reply,
    }
}

/// One call for the goal, then search. Unreadable goals and unsolvable
/// problems give an empty plan; the reason is kept in `note`. The initial
/// state always comes from the world, not from the reply.
pub fn plan_llmp(
    provider: &dyn Provider,
    strategy: StrategyKind,
    input: &PlanningInput,
    initial: &WorldState,
    search_budget: usize,
) -> Result<PlannerOutput, StrategyError> {
    let prompt = llmp_prompt(strategy, input, initial)?;
    let mut usage = Usage::default();
    let reply = match provider.complete(&[ChatMessage::user(prompt)], &Limits::generation()) {
        Ok(r) => {
            usage.record(&r);
            r.text
        }
        Err(e) => return Ok(failed(usage, format!("provider: {e}"))),
    };
    let parsed = match parse_problem(extract_problem(&reply)) {
        Ok(p) => p,
        Err(e) => return Ok(failed(usage, format!("problem {}: {e}", e.class()))),
    };
    if parsed.goal.is_empty() {
        return Ok(failed(usage, "problem has an empty goal".to_string()));
    }
    let problem = problem_for(initial, parsed.goal);
    match solve(DomainModel::household(), &problem, search_budget) {
        Some(p) => {
            let plan = Plan::new(p.steps().to_vec(), Provenance::Llmp)
                .expect("solver plans have no Done")
                .finished();
            Ok(PlannerOutput {
                plan,
                usage,
                fallbacks: 0,
                note: None,
            })
        }
        None => Ok(failed(usage, "no plan reaches the goal".to_string())),
    }
}

fn failed(usage: Usage, note: String) -> PlannerOutput {
    PlannerOutput {
        plan: Plan::empty(Provenance::Llmp),
        usage,
        fallbacks: 1,
        note: Some(note),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::gateway::ReplayProvider;
    use crate::strategies::EMPTY_SECTION;
    use crate::world::{load_scene, SkillAction};

    fn input() -> PlanningInput {
        PlanningInput {
            scene: String::new(),
            context: EMPTY_SECTION.into(),
            instruction: "Put the tomato on the dining table.".into(),
            rewrite: None,
        }
    }

    #[test]
    fn goal_from_reply_is_planned() {
        let s = load_scene(&assets::scene("kitchen_1").unwrap()).unwrap();
        let reply = "Here you go:\n```pddl\n(define (problem p) (:domain household) (:init) (:goal (and (at tomato DiningTable))))\n```";
        let p = ReplayProvider::new(vec![reply]);
        let out = plan_llmp(&p, StrategyKind::None, &input(), &s, 10_000).unwrap();
        assert!(out.plan.is_finished());
        assert_eq!(out.plan.len(), 5);
        assert!(out.plan.mentions("tomato"));
        assert_eq!(out.usage.calls, 1);
    }

    #[test]
    fn unreadable_reply_gives_empty_plan() {
        let s = load_scene(&assets::scene("kitchen_1").unwrap()).unwrap();
        let p = ReplayProvider::new(vec!["I would put the tomato away."]);
        let out = plan_llmp(&p, StrategyKind::None, &input(), &s, 10_000).unwrap();
        assert!(out.plan.is_empty());
        assert!(out.note.is_some());
        assert_ne!(out.plan.steps().first(), Some(&SkillAction::Done));
    }
}
