use std::sync::mpsc;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::record::{classify_error, EvalRecord, RewriteAudit, RECORD_SCHEMA};
use crate::dataset::Episode;
use crate::gateway::{Provider, Usage};
use crate::planners::{plan_llmp, plan_saycan, PlannerKind, PlannerOutput, SaycanConfig, DEFAULT_SEARCH_BUDGET};
use crate::strategies::{prepare, StrategyConfig};
use crate::world::{check_goal, execute_plan, load_scene};

/// Everything that shapes a run besides the episodes and the provider.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub run_id: String,
    pub run_seed: u64,
    pub planner: PlannerKind,
    pub strategy: StrategyConfig,
    #[serde(default)]
    pub saycan: SaycanConfig,
    #[serde(default = "default_search_budget")]
    pub search_budget: usize,
}

fn default_search_budget() -> usize {
    DEFAULT_SEARCH_BUDGET
}

impl EvalConfig {
    pub fn new(run_id: impl Into<String>, planner: PlannerKind, strategy: StrategyConfig) -> Self {
        EvalConfig {
            run_id: run_id.into(),
            run_seed: 0,
            planner,
            strategy,
            saycan: SaycanConfig::default(),
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

/// Plans, executes and scores one episode. Every failure, including a
/// broken episode, becomes a record.
pub fn run_episode(episode: &Episode, cfg: &EvalConfig, provider: &dyn Provider) -> EvalRecord {
    let mut rec = EvalRecord {
        schema: RECORD_SCHEMA,
        run_id: cfg.run_id.clone(),
        run_seed: cfg.run_seed,
        episode_id: episode.id.clone(),
        cell: episode.cell,
        task: episode.goal.kind(),
        planner: cfg.planner,
        strategy: cfg.strategy.kind,
        plan: Vec::new(),
        trace: Vec::new(),
        termination: crate::world::Termination::PlanExhausted,
        success: false,
        error: classify_error(&[], &episode.targets, false),
        planning_steps: 0,
        calls: 0,
        input_tokens: 0,
        output_tokens: 0,
        total_tokens: 0,
        latency_ms: 0,
        tokens_estimated: false,
        choice_fallbacks: 0,
        rewrite: None,
        note: None,
    };
    let initial = match load_scene(&episode.scene) {
        Ok(s) => s,
        Err(e) => {
            rec.note = Some(format!("scene: {e}"));
            return rec;
        }
    };
    let input = match prepare(cfg.strategy, episode, provider) {
        Ok(i) => i,
        Err(e) => {
            rec.note = Some(e.to_string());
            return rec;
        }
    };
    let mut usage = Usage::default();
    if let Some(r) = &input.rewrite {
        usage.add(&r.usage);
        rec.rewrite = Some(RewriteAudit {
            text: r.text.clone(),
            fallback: r.fallback,
            input_tokens: r.usage.input_tokens,
            output_tokens: r.usage.output_tokens,
            latency_ms: r.usage.latency_ms,
        });
    }
    let planned = match cfg.planner {
        PlannerKind::Saycan => plan_saycan(provider, cfg.strategy.kind, &input, &initial, &cfg.saycan),
        PlannerKind::Llmp => plan_llmp(provider, cfg.strategy.kind, &input, &initial, cfg.search_budget),
    };
    let PlannerOutput {
        plan,
        usage: plan_usage,
        fallbacks,
        note,
    } = match planned {
        Ok(p) => p,
        Err(e) => {
            rec.note = Some(e.to_string());
            return rec;
        }
    };
    usage.add(&plan_usage);
    rec.planning_steps = match cfg.planner {
        PlannerKind::Saycan => plan.len() as u64,
        PlannerKind::Llmp => 1,
    };
    let trace = execute_plan(&initial, plan.steps(), cfg.saycan.step_budget.max(plan.len()));
    let success = check_goal(&trace.final_state, &episode.goal).unwrap_or(false);
    rec.plan = plan.steps().to_vec();
    rec.error = classify_error(&rec.plan, &episode.targets, success);
    rec.success = success;
    rec.trace = trace.steps;
    rec.termination = trace.termination;
    rec.calls = usage.calls;
    rec.input_tokens = usage.input_tokens;
    rec.output_tokens = usage.output_tokens;
    rec.total_tokens = usage.total_tokens();
    rec.latency_ms = usage.latency_ms;
    rec.tokens_estimated = usage.estimated;
    rec.choice_fallbacks = fallbacks;
    rec.note = note;
    rec
}

/// Runs episodes on up to `jobs` threads. Results come back through one
/// channel and are stored by episode position, so the output order never
/// depends on scheduling.
pub fn run_all(episodes: &[Episode], cfg: &EvalConfig, provider: &dyn Provider, jobs: usize) -> Vec<EvalRecord> {
    let jobs = jobs.clamp(1, episodes.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, EvalRecord)>();
    let mut out: Vec<Option<EvalRecord>> = vec![None; episodes.len()];
    std::thread::scope(|s| {
        for _ in 0..jobs {
            let tx = tx.clone();
            let next = &next;
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(ep) = episodes.get(i) else { break };
                if tx.send((i, run_episode(ep, cfg, provider))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, rec) in rx {
            out[i] = Some(rec);
        }
    });
    out.into_iter().map(|r| r.expect("every episode yields a record")).collect()
}
