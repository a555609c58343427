//! Step-wise constrained skill selection.

use serde::{Deserialize, Serialize};

use super::nl::step_to_nl;
use super::plan::{Plan, Provenance};
use super::PlannerOutput;
use crate::gateway::{choose, render_options, ChatMessage, Limits, Provider, Usage, DEFAULT_CHOICE_RETRIES};
use crate::strategies::{wrap_prompt, PlanningInput, StrategyError, StrategyKind, EMPTY_SECTION, T_PLAN};
use crate::world::{SkillAction, WorldState, DEFAULT_STEP_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaycanConfig {
    pub step_budget: usize,
    pub choice_retries: u32,
}

impl Default for SaycanConfig {
    fn default() -> Self {
        SaycanConfig {
            step_budget: DEFAULT_STEP_BUDGET,
            choice_retries: DEFAULT_CHOICE_RETRIES,
        }
    }
}

/// Prompt for one selection step.
pub fn step_prompt(
    strategy: StrategyKind,
    input: &PlanningInput,
    history: &[SkillAction],
    options: &[SkillAction],
) -> Result<String, StrategyError> {
    let history = if history.is_empty() {
        EMPTY_SECTION.to_string()
    } else {
        history.iter().map(step_to_nl).collect::<Vec<_>>().join("\n")
    };
    let options = render_options(&options.iter().map(step_to_nl).collect::<Vec<_>>());
    let body = T_PLAN.render(&[
        ("scene", &input.scene),
        ("context", &input.context),
        ("instruction", &input.instruction),
        ("history", &history),
        ("options", &options),
    ])?;
    wrap_prompt(strategy, &input.instruction, body)
}

/// Asks for one applicable skill at a time until `Done` or the budget.
/// Steps are applied to a private copy of `initial`, so every chosen step
/// is executable.
pub fn plan_saycan(
    provider: &dyn Provider,
    strategy: StrategyKind,
    input: &PlanningInput,
    initial: &WorldState,
    cfg: &SaycanConfig,
) -> Result<PlannerOutput, StrategyError> {
    let mut state = initial.clone();
    let mut plan = Plan::empty(Provenance::Saycan);
    let mut usage = Usage::default();
    let mut fallbacks = 0;
    let mut errors = Vec::new();
    while plan.len() < cfg.step_budget {
        let options = state.available_actions();
        let prompt = step_prompt(strategy, input, plan.steps(), &options)?;
        let c = choose(
            provider,
            &[ChatMessage::user(prompt)],
            options.len(),
            cfg.choice_retries,
            &Limits::default(),
        );
        usage.add(&c.usage);
        if c.fallback {
            fallbacks += 1;
        }
        if let Some(e) = c.error {
            errors.push(e);
        }
        let step = options[c.index].clone();
        state = state
            .apply_action(&step)
            .expect("available actions are applicable");
        plan.push(step.clone());
        if step == SkillAction::Done {
            break;
        }
    }
    Ok(PlannerOutput {
        plan,
        usage,
        fallbacks,
        note: errors.first().cloned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::gateway::ReplayProvider;
    use crate::world::load_scene;

    fn input() -> PlanningInput {
        PlanningInput {
            scene: "- apple: Apple, at CounterTop".into(),
            context: EMPTY_SECTION.into(),
            instruction: "Put the apple in the fridge.".into(),
            rewrite: None,
        }
    }

    #[test]
    fn replayed_choices_build_the_plan() {
        let s = load_scene(&assets::scene("kitchen_1").unwrap()).unwrap();
        let opts = s.available_actions();
        let go = opts.iter().position(|a| *a == "GoTo(CounterTop)".parse().unwrap()).unwrap();
        let done = opts.iter().position(|a| *a == SkillAction::Done).unwrap();
        let p = ReplayProvider::new(vec![
            format!("({})", crate::gateway::option_label(go)),
            "nonsense".to_string(),
            "more nonsense".to_string(),
            "still nonsense".to_string(),
        ]);
        let out = plan_saycan(&p, StrategyKind::None, &input(), &s, &SaycanConfig { step_budget: 2, choice_retries: 2 }).unwrap();
        assert_eq!(out.plan.steps()[0], "GoTo(CounterTop)".parse().unwrap());
        assert_eq!(out.plan.len(), 2);
        assert_eq!(out.fallbacks, 1);
        assert_eq!(out.usage.calls, 4);
        let _ = done;
    }

    #[test]
    fn history_and_options_are_rendered() {
        let steps: Vec<SkillAction> = vec!["GoTo(Fridge)".parse().unwrap()];
        let opts = vec![SkillAction::Done, "Open(Fridge)".parse().unwrap()];
        let p = step_prompt(StrategyKind::None, &input(), &steps, &opts).unwrap();
        assert!(p.contains("Executed Steps:\nGo to the Fridge.\n"));
        assert!(p.contains("Options:\n(a) Done.\n(b) Open the Fridge.\n"));
    }
}
