//! Acceptance criteria. Each test prints one PASS/FAIL line straight to
//! stderr so the verdicts show up even when output is captured.

mod support;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reibench::dataset::sample::stratified_indices;
use reibench::dataset::{filter_episode, table3, ContextType, Episode, FilterRules, RECountQuad, RELevel};
use reibench::eval::{
    aggregate, classify_error, emit_report, Aggregate, ErrorClass, EvalRecord, ReportFormat,
};
use reibench::gateway::ScriptedMode;
use reibench::planners::lower::lower_task;
use reibench::planners::{solve, DomainModel, PlannerKind, DEFAULT_SEARCH_BUDGET};
use reibench::selfcheck::{fixture_episodes, scripted_run};
use reibench::strategies::StrategyKind;
use reibench::world::{check_goal, execute_plan, load_scene, SkillAction, TaskGoal, TaskKind, WorldState};

use support::{bfs_plan_length, traits, OState};

fn verdict(n: u8, name: &str, passed: bool, detail: &str) {
    let line = format!(
        "ACCEPTANCE {n:>2} {} {name}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(passed, "criterion {n} ({name}) failed: {detail}");
}

fn points(r: Ratio<u64>) -> Ratio<i64> {
    Ratio::new(*r.numer() as i64 * 100, *r.denom() as i64)
}

fn success(a: &Aggregate, level: RELevel, ctx: ContextType) -> Ratio<u64> {
    a.cell(level, ctx).success_rate().unwrap()
}

fn fixtures() -> Vec<Episode> {
    let f = fixture_episodes(0);
    assert_eq!(f.len(), 54);
    for kind in TaskKind::ALL {
        for level in RELevel::ALL {
            for ctx in ContextType::ALL {
                assert_eq!(
                    f.iter()
                        .filter(|e| e.goal.kind() == kind && e.cell.level == level && e.cell.context == ctx)
                        .count(),
                    1
                );
            }
        }
    }
    f
}

fn run(f: &[Episode], mode: ScriptedMode, strategy: StrategyKind) -> Vec<EvalRecord> {
    scripted_run(f, mode, PlannerKind::Saycan, strategy)
}

#[test]
fn criterion_01_oracle_success() {
    let f = fixtures();
    let start = Instant::now();
    let records = run(&f, ScriptedMode::PerfectResolution, StrategyKind::None);
    let elapsed = start.elapsed();
    let ok = records.iter().filter(|r| r.success).count();
    verdict(
        1,
        "perfect resolution + SayCan succeeds everywhere",
        ok == 54 && records.len() == 54 && elapsed < Duration::from_secs(10),
        &format!("{ok}/54 in {:.2} s (limit 10 s)", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_02_degradation_ordering() {
    let f = fixtures();
    let a = aggregate(&run(&f, ScriptedMode::ContextBlind, StrategyKind::None)).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for ctx in ContextType::ALL {
        let (e, m, i) = (
            success(&a, RELevel::Explicit, ctx),
            success(&a, RELevel::Mixed, ctx),
            success(&a, RELevel::Implicit, ctx),
        );
        ok &= e > m && m >= i && points(e) - points(i) >= Ratio::from_integer(20);
        parts.push(format!("{} E/M/I {}/{}/{}", ctx.as_str(), points(e), points(m), points(i)));
    }
    verdict(2, "context-blind: Explicit > Mixed >= Implicit, gap >= 20", ok, &parts.join("; "));
}

#[test]
fn criterion_03_tocc_recovery() {
    let f = fixtures();
    let base = aggregate(&run(&f, ScriptedMode::ContextBlind, StrategyKind::None)).unwrap();
    let tocc = aggregate(&run(&f, ScriptedMode::ContextBlind, StrategyKind::Tocc)).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for level in RELevel::ALL {
        for ctx in ContextType::ALL {
            let d = points(success(&tocc, level, ctx)) - points(success(&base, level, ctx));
            ok &= match level {
                RELevel::Explicit => d >= Ratio::from_integer(-2) && d <= Ratio::from_integer(2),
                _ => d >= Ratio::from_integer(10),
            };
            parts.push(format!("{}-{} {:+}", level.as_str(), ctx.as_str(), d));
        }
    }
    verdict(3, "TOCC: Mixed/Implicit +10 each, Explicit within 2", ok, &parts.join(", "));
}

fn synthetic_record(template: &EvalRecord, class: ErrorClass, target: &str) -> EvalRecord {
    let mut r = template.clone();
    let targets = [target.to_string()].into_iter().collect();
    let (plan, success) = match class {
        ErrorClass::None => (vec![SkillAction::PickUp(target.into()), SkillAction::Done], true),
        ErrorClass::ExecutionError => (vec![SkillAction::PickUp(target.into()), SkillAction::Done], false),
        ErrorClass::ObjectOmission => (vec![SkillAction::Done], false),
    };
    r.error = classify_error(&plan, &targets, success);
    assert_eq!(r.error, class);
    r.success = success;
    r.plan = plan;
    r
}

#[test]
fn criterion_04_error_decomposition() {
    let f = fixtures();
    let mut runs = Vec::new();
    for (mode, strategy) in [
        (ScriptedMode::PerfectResolution, StrategyKind::None),
        (ScriptedMode::ContextBlind, StrategyKind::None),
        (ScriptedMode::ContextBlind, StrategyKind::Tocc),
        (ScriptedMode::OmitObject, StrategyKind::None),
        (ScriptedMode::Echo, StrategyKind::None),
    ] {
        runs.push(run(&f, mode, strategy));
    }
    runs.push(scripted_run(&f, ScriptedMode::ContextBlind, PlannerKind::Llmp, StrategyKind::None));
    let one = Ratio::from_integer(1u64);
    let mut exact = true;
    for recs in &runs {
        let a = aggregate(recs).unwrap();
        for c in a.cells.values().chain([a.overall()].iter()) {
            let (s, o, e) = (c.success_rate().unwrap(), c.omission_rate().unwrap(), c.execution_rate().unwrap());
            exact &= o + e == one - s && c.successes + c.omissions + c.executions == c.n;
        }
    }
    // 1000 records: 226 omissions, 305 execution errors, the rest successes.
    let template = &runs[0][0];
    let mut table = Vec::new();
    for i in 0..1000 {
        let class = if i < 226 {
            ErrorClass::ObjectOmission
        } else if i < 531 {
            ErrorClass::ExecutionError
        } else {
            ErrorClass::None
        };
        let mut r = synthetic_record(template, class, "tomato");
        r.episode_id = format!("row-{i}");
        table.push(r);
    }
    let a = aggregate(&table).unwrap();
    let o = a.overall();
    let csv = emit_report(std::slice::from_ref(&a), None, ReportFormat::Csv);
    let overall_row = csv
        .lines()
        .find(|l| l.split(',').nth(5) == Some("1000"))
        .unwrap_or("")
        .to_string();
    let fields: Vec<&str> = overall_row.split(',').collect();
    let row_ok = fields.len() >= 13 && fields[10] == "22.6" && fields[11] == "30.5" && fields[12] == "53.1";
    let sum_ok = o.omission_rate().unwrap() + o.execution_rate().unwrap() == o.overall_rate().unwrap()
        && o.overall_rate().unwrap() == Ratio::new(531, 1000);
    verdict(
        4,
        "omission + execution = 1 - success, exact",
        exact && row_ok && sum_ok,
        &format!("{} runs exact: {exact}; fixture row `{overall_row}`", runs.len()),
    );
}

#[test]
fn criterion_05_counting_filter() {
    let q = RECountQuad::new;
    // (level, quad, accepted)
    let cases = [
        (RELevel::Explicit, q(3, 1, 0, 0), true),
        (RELevel::Explicit, q(2, 1, 0, 0), false),
        (RELevel::Explicit, q(5, 2, 0, 0), true),
        (RELevel::Explicit, q(5, 0, 0, 0), false),
        (RELevel::Explicit, q(3, 1, 1, 0), false),
        (RELevel::Explicit, q(3, 1, 0, 1), false),
        (RELevel::Mixed, q(3, 0, 0, 1), true),
        (RELevel::Mixed, q(2, 0, 0, 1), false),
        (RELevel::Mixed, q(4, 1, 0, 1), false),
        (RELevel::Mixed, q(4, 0, 1, 2), false),
        (RELevel::Mixed, q(4, 0, 0, 2), true),
        (RELevel::Mixed, q(4, 0, 0, 0), false),
        (RELevel::Implicit, q(1, 0, 2, 1), true),
        (RELevel::Implicit, q(0, 0, 2, 1), false),
        (RELevel::Implicit, q(2, 1, 2, 1), false),
        (RELevel::Implicit, q(2, 0, 1, 1), false),
        (RELevel::Implicit, q(2, 0, 3, 0), false),
        (RELevel::Implicit, q(2, 0, 3, 2), true),
    ];
    let rules = FilterRules::printed();
    let wrong: Vec<String> = cases
        .iter()
        .filter(|(l, quad, want)| filter_episode(*quad, *l, &rules) != *want)
        .map(|(l, quad, want)| format!("{} {quad:?} expected {want}", l.as_str()))
        .collect();
    verdict(
        5,
        "counting filter on 18 handcrafted quads",
        wrong.is_empty(),
        &if wrong.is_empty() { "18/18".to_string() } else { wrong.join("; ") },
    );
}

#[test]
fn criterion_06_stratified_sampler() {
    let mut pool_rng = ChaCha8Rng::seed_from_u64(99);
    let pool: Vec<TaskKind> = (0..10_000).map(|_| *TaskKind::ALL.choose(&mut pool_rng).unwrap()).collect();
    let draw = |seed: u64| {
        let idx = stratified_indices(&pool, 1000, &table3(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let mut counts: BTreeMap<TaskKind, u64> = BTreeMap::new();
        for i in &idx {
            *counts.entry(pool[*i]).or_default() += 1;
        }
        (idx, counts)
    };
    let (a, counts) = draw(5);
    let (b, _) = draw(5);
    let order = [
        TaskKind::CoolPlace,
        TaskKind::HeatPlace,
        TaskKind::CleanPlace,
        TaskKind::ExamineInLight,
        TaskKind::StackPlace,
        TaskKind::PickPlace,
    ];
    let got: Vec<u64> = order.iter().map(|k| counts.get(k).copied().unwrap_or(0)).collect();
    verdict(
        6,
        "n = 1000 with the default task proportions",
        got == [168, 168, 162, 133, 184, 185] && a == b && a.len() == 1000,
        &format!("{got:?}, deterministic: {}", a == b),
    );
}

fn random_goal(scene: &OState, rng: &mut ChaCha8Rng) -> Option<TaskGoal> {
    let objs: Vec<&String> = scene.objects.keys().collect();
    let pick: Vec<&String> = objs.iter().copied().filter(|o| traits(&scene.objects[*o].0).pickup).collect();
    let carriers: Vec<&String> = pick.iter().copied().filter(|o| traits(&scene.objects[*o].0).container).collect();
    let lights: Vec<&String> = objs.iter().copied().filter(|o| traits(&scene.objects[*o].0).toggle).collect();
    let recs: Vec<&String> = scene.receptacles.keys().collect();
    let has = |f: fn(&support::Traits) -> bool| scene.receptacles.values().any(|(k, _)| f(&traits(k)));
    let t = (*pick.choose(rng)?).clone();
    let d = (*recs.choose(rng)?).clone();
    Some(match rng.gen_range(0..6) {
        0 => TaskGoal::PickPlace { target: t, destination: d },
        1 => {
            let c = (*carriers.choose(rng)?).clone();
            if c == t {
                return None;
            }
            TaskGoal::StackPlace { target: t, carrier: c, destination: d }
        }
        2 if has(|t| t.clean) => TaskGoal::CleanPlace { target: t, destination: d },
        3 if has(|t| t.heat) => TaskGoal::HeatPlace { target: t, destination: d },
        4 if has(|t| t.cool) => TaskGoal::CoolPlace { target: t, destination: d },
        5 => TaskGoal::ExamineInLight { target: t, light: (*lights.choose(rng)?).clone() },
        _ => return None,
    })
}

#[test]
fn criterion_07_solver_optimality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let scenes: Vec<(&str, &str)> = reibench::assets::SCENES
        .iter()
        .copied()
        .filter(|(_, text)| OState::from_scene_json(text).objects.len() <= 8)
        .collect();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let mut attempts = 0;
    while checked < 100 && attempts < 2000 {
        attempts += 1;
        let (name, text) = scenes[rng.gen_range(0..scenes.len())];
        let Some(goal) = random_goal(&OState::from_scene_json(text), &mut rng) else { continue };
        let state: WorldState = load_scene(&reibench::assets::scene(name).unwrap()).unwrap();
        let Some(best) = bfs_plan_length(&state, &goal, 12) else { continue };
        checked += 1;
        let plan = solve(DomainModel::household(), &lower_task(&state, &goal), DEFAULT_SEARCH_BUDGET);
        match plan {
            Some(p) => {
                let trace = execute_plan(&state, p.steps(), p.len() + 1);
                let reached = !trace.failed() && check_goal(&trace.final_state, &goal).unwrap();
                if p.len() != best || !reached {
                    mismatches.push(format!("{name} {goal:?}: solver {} vs bfs {best}, reached {reached}", p.len()));
                }
            }
            None => mismatches.push(format!("{name} {goal:?}: solver found nothing, bfs {best}")),
        }
    }
    let elapsed = start.elapsed();
    verdict(
        7,
        "solver length equals BFS on 100 random goals",
        checked == 100 && mismatches.is_empty() && elapsed < Duration::from_secs(30),
        &format!(
            "{checked} goals over {} scenes, {} mismatches, {:.1} s (limit 30 s){}",
            scenes.len(),
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches.first().map(|m| format!("; first: {m}")).unwrap_or_default()
        ),
    );
}

fn tiny_goals(s: &OState) -> Vec<TaskGoal> {
    let objs: Vec<String> = s.objects.keys().cloned().collect();
    let recs: Vec<String> = s.receptacles.keys().cloned().collect();
    let mut goals = Vec::new();
    for t in &objs {
        for d in &recs {
            goals.push(TaskGoal::PickPlace { target: t.clone(), destination: d.clone() });
            goals.push(TaskGoal::CleanPlace { target: t.clone(), destination: d.clone() });
            goals.push(TaskGoal::HeatPlace { target: t.clone(), destination: d.clone() });
            goals.push(TaskGoal::CoolPlace { target: t.clone(), destination: d.clone() });
            for c in &objs {
                if c != t {
                    goals.push(TaskGoal::StackPlace { target: t.clone(), carrier: c.clone(), destination: d.clone() });
                }
            }
        }
        for l in &objs {
            goals.push(TaskGoal::ExamineInLight { target: t.clone(), light: l.clone() });
        }
    }
    goals
}

struct Walk<'a> {
    initial: &'a WorldState,
    oracle_initial: &'a OState,
    groundings: Vec<SkillAction>,
    goals: Vec<TaskGoal>,
    sequences: u64,
    disagreements: Vec<String>,
}

impl Walk<'_> {
    fn visit(&mut self, lib: &WorldState, orc: &OState, path: &mut Vec<SkillAction>) {
        let mut want: Vec<SkillAction> = self.groundings.iter().filter(|a| orc.applicable(a)).cloned().collect();
        want.sort();
        if lib.available_actions() != want {
            self.disagreements.push(format!("option set after {path:?}"));
        }
        for a in self.groundings.clone() {
            path.push(a.clone());
            self.sequences += 1;
            let trace = execute_plan(self.initial, path, 10);
            let (o_final, o_failed) = self.oracle_initial.run(path);
            if OState::observe(&trace.final_state) != o_final || trace.failed() != o_failed {
                self.disagreements.push(format!("execute_plan on {path:?}"));
            }
            for g in &self.goals {
                if check_goal(&trace.final_state, g).unwrap() != o_final.goal_holds(g) {
                    self.disagreements.push(format!("check_goal {g:?} after {path:?}"));
                }
            }
            let stepped = (lib.apply_action(&a).ok(), orc.step(&a));
            match stepped {
                (Some(l), Some(o)) => {
                    if OState::observe(&l) != o {
                        self.disagreements.push(format!("apply_action state after {path:?}"));
                    } else if path.len() < 4 && a != SkillAction::Done {
                        self.visit(&l, &o, path);
                    }
                }
                (None, None) => {}
                _ => self.disagreements.push(format!("applicability of {a} after {path:?}")),
            }
            path.pop();
        }
    }
}

/// Sequences of length 1..=4 whose every proper prefix is executable.
fn oracle_sequences(s: &OState, groundings: &[SkillAction], depth: usize) -> u64 {
    let mut n = groundings.len() as u64;
    if depth + 1 < 4 {
        for a in groundings.iter().filter(|a| **a != SkillAction::Done) {
            if let Some(next) = s.step(a) {
                n += oracle_sequences(&next, groundings, depth + 1);
            }
        }
    }
    n
}

#[test]
fn criterion_08_world_oracle_equivalence() {
    let text = reibench::assets::scene_text("tiny_3").unwrap();
    let oracle = OState::from_scene_json(text);
    assert_eq!(oracle.objects.len(), 3);
    let initial = load_scene(&reibench::assets::scene("tiny_3").unwrap()).unwrap();
    assert_eq!(OState::observe(&initial), oracle);
    let mut walk = Walk {
        initial: &initial,
        oracle_initial: &oracle,
        groundings: oracle.groundings(),
        goals: tiny_goals(&oracle),
        sequences: 0,
        disagreements: Vec::new(),
    };
    walk.visit(&initial, &oracle, &mut Vec::new());
    let expected = oracle_sequences(&oracle, &walk.groundings, 0);
    verdict(
        8,
        "world agrees with the brute-force interpreter up to length 4",
        walk.disagreements.is_empty() && walk.sequences == expected,
        &format!(
            "{} of {expected} sequences x {} goals, {} disagreements{}",
            walk.sequences,
            walk.goals.len(),
            walk.disagreements.len(),
            walk.disagreements.first().map(|d| format!("; first: {d}")).unwrap_or_default()
        ),
    );
}

fn cli(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_reibench"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn pipeline(dir: &Path) -> Vec<Vec<u8>> {
    let seeds: Vec<serde_json::Value> = serde_json::from_str(reibench::dataset::seeds::SEEDS_TEXT).unwrap();
    let mut picked: Vec<serde_json::Value> = Vec::new();
    for s in seeds {
        if !picked.iter().any(|p| p["goal"]["kind"] == s["goal"]["kind"]) {
            picked.push(s);
        }
    }
    std::fs::write(dir.join("seeds.json"), serde_json::to_string_pretty(&picked).unwrap()).unwrap();
    cli(dir, &["generate", "--seeds", "seeds.json", "--seed", "17", "--out", "dataset.jsonl"]);
    cli(dir, &["evaluate", "--dataset", "dataset.jsonl", "--mode", "context-blind", "--strategy", "tocc", "--seed", "17", "--out", "run"]);
    cli(dir, &["report", "--records", "run/records.jsonl", "--out", "report.md"]);
    cli(dir, &["report", "--records", "run/records.jsonl", "--format", "csv", "--out", "report.csv"]);
    ["dataset.jsonl", "run/records.jsonl", "report.md", "report.csv"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn criterion_09_pipeline_determinism() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = pipeline(a.path());
    let second = pipeline(b.path());
    let names = ["dataset", "records", "report.md", "report.csv"];
    let same: Vec<String> = names
        .iter()
        .zip(first.iter().zip(&second))
        .map(|(n, (x, y))| format!("{n} {}", if x == y && !x.is_empty() { "identical" } else { "DIFFERS" }))
        .collect();
    verdict(
        9,
        "generate + evaluate + report twice is byte-identical",
        first == second && first.iter().all(|f| !f.is_empty()),
        &same.join(", "),
    );
}

#[test]
fn criterion_10_token_accounting() {
    let f = fixtures();
    let none = run(&f, ScriptedMode::PerfectResolution, StrategyKind::None);
    let tocc = run(&f, ScriptedMode::PerfectResolution, StrategyKind::Tocc);
    let additive = none.iter().chain(&tocc).all(|r| r.total_tokens == r.input_tokens + r.output_tokens);
    let one_extra = none
        .iter()
        .zip(&tocc)
        .all(|(a, b)| a.episode_id == b.episode_id && b.calls == a.calls + 1 && b.rewrite.is_some());
    let (an, at) = (aggregate(&none).unwrap(), aggregate(&tocc).unwrap());
    let more = at.usage.total_tokens() > an.usage.total_tokens();
    let md = emit_report(&[an.clone(), at.clone()], None, ReportFormat::Markdown);
    let header = md.lines().find(|l| l.contains("Avg Input")).unwrap_or("").to_string();
    let cols: Vec<&str> = header.split('|').map(str::trim).filter(|s| !s.is_empty()).collect();
    let layout = cols.len() == 5
        && cols[1] == "Avg Input"
        && cols[2] == "Avg Output"
        && cols[3] == "Avg Total"
        && cols[4].starts_with("Latency");
    verdict(
        10,
        "token totals, one extra TOCC call, report columns",
        additive && one_extra && more && layout,
        &format!(
            "additive {additive}, one extra call {one_extra}, tokens {} -> {}, header `{header}`",
            an.usage.total_tokens(),
            at.usage.total_tokens()
        ),
    );
}
