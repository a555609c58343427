//! Optimal forward search over grounded schemas.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use super::domain::{Atom, DomainModel, Literal, Schema};
use super::plan::{Plan, Provenance};
use super::problem::ProblemInstance;
use crate::world::SkillAction;

/// Node expansions allowed before search gives up.
pub const DEFAULT_SEARCH_BUDGET: usize = 200_000;

/// A schema applied to constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub skill: SkillAction,
}

struct Grounded {
    name: GroundAction,
    pre_pos: Vec<usize>,
    pre_neg: Vec<usize>,
    add: Vec<usize>,
    del: Vec<usize>,
}

type Bits = Box<[u64]>;

fn has(bits: &[u64], i: usize) -> bool {
    bits[i / 64] & (1 << (i % 64)) != 0
}

fn set(bits: &mut [u64], i: usize, on: bool) {
    if on {
        bits[i / 64] |= 1 << (i % 64);
    } else {
        bits[i / 64] &= !(1 << (i % 64));
    }
}

fn substitute(atom: &Atom, params: &[String], binding: &[usize], consts: &[String]) -> Atom {
    Atom {
        pred: atom.pred.clone(),
        args: atom
            .args
            .iter()
            .map(|a| {
                let i = params.iter().position(|p| p == a).expect("validated parameter");
                consts[binding[i]].clone()
            })
            .collect(),
    }
}

struct Task {
    actions: Vec<Grounded>,
    init: Bits,
    goal: Vec<usize>,
}

/// Ground atom: predicate index followed by constant indices.
type Key = Box<[u32]>;

struct LitTpl {
    pred: u32,
    /// Parameter positions of the arguments.
    args: Vec<usize>,
    positive: bool,
    is_static: bool,
}

impl LitTpl {
    fn key(&self, binding: &[u32]) -> Key {
        std::iter::once(self.pred).chain(self.args.iter().map(|&i| binding[i])).collect()
    }

    /// Whether the literal holds in `facts`, without allocating.
    fn holds(&self, binding: &[u32], facts: &HashSet<Key>, buf: &mut Vec<u32>) -> bool {
        buf.clear();
        buf.push(self.pred);
        buf.extend(self.args.iter().map(|&i| binding[i]));
        facts.contains(&buf[..]) == self.positive
    }
}

struct RawAction {
    schema: usize,
    binding: Vec<u32>,
    pre_pos: Vec<Key>,
    pre_neg: Vec<Key>,
    add: Vec<Key>,
    del: Vec<Key>,
}

/// Grounds the problem; `None` when some goal atom can never hold.
fn compile(domain: &DomainModel, problem: &ProblemInstance) -> Option<Task> {
    let statics = domain.static_predicates();
    let mut consts: BTreeSet<&str> = problem.objects.iter().map(String::as_str).collect();
    for a in problem.init.iter().chain(&problem.goal) {
        consts.extend(a.args.iter().map(String::as_str));
    }
    let consts: Vec<&str> = consts.into_iter().collect();
    let const_ix: HashMap<&str, u32> = consts.iter().enumerate().map(|(i, c)| (*c, i as u32)).collect();
    let preds: Vec<&str> = domain.predicates.keys().map(String::as_str).collect();
    let pred_ix: HashMap<&str, u32> = preds.iter().enumerate().map(|(i, p)| (*p, i as u32)).collect();
    let key_of = |a: &Atom| -> Option<Key> {
        std::iter::once(pred_ix.get(a.pred.as_str()).copied())
            .chain(a.args.iter().map(|c| const_ix.get(c.as_str()).copied()))
            .collect()
    };
    let is_static = |k: &Key| statics.contains(preds[k[0] as usize]);
    let init_keys: HashSet<Key> = problem.init.iter().filter_map(key_of).collect();

    let mut raw: Vec<RawAction> = Vec::new();
    for (si, schema) in domain.schemas.iter().enumerate() {
        let tpl = |l: &Literal| LitTpl {
            pred: pred_ix[l.atom.pred.as_str()],
            args: l
                .atom
                .args
                .iter()
                .map(|a| schema.params.iter().position(|p| p == a).expect("validated parameter"))
                .collect(),
            positive: l.positive,
            is_static: statics.contains(l.atom.pred.as_str()),
        };
        let pre: Vec<LitTpl> = schema.pre.iter().map(tpl).collect();
        let eff: Vec<LitTpl> = schema.effects.iter().map(tpl).collect();
        // static literals grouped by the last parameter they mention
        let n = schema.params.len();
        let mut checks: Vec<Vec<&LitTpl>> = vec![Vec::new(); n + 1];
        for l in pre.iter().filter(|l| l.is_static) {
            let at = l.args.iter().map(|&i| i + 1).max().unwrap_or(0);
            checks[at].push(l);
        }
        let mut buf = Vec::with_capacity(4);
        let mut ok = |depth: usize, binding: &[u32]| checks[depth].iter().all(|l| l.holds(binding, &init_keys, &mut buf));
        if !ok(0, &[]) {
            continue;
        }
        let mut binding: Vec<u32> = Vec::with_capacity(n);
        let mut stack: Vec<u32> = if n == 0 { Vec::new() } else { vec![0] };
        // iterative depth-first enumeration of bindings
        while let Some(next) = stack.pop() {
            binding.truncate(stack.len());
            if next as usize >= consts.len() {
                continue;
            }
            stack.push(next + 1);
            binding.push(next);
            if !ok(binding.len(), &binding) {
                continue;
            }
            if binding.len() < n {
                stack.push(0);
                continue;
            }
            let keys = |list: &[LitTpl], positive: bool| -> Vec<Key> {
                list.iter()
                    .filter(|l| l.positive == positive && !l.is_static)
                    .map(|l| l.key(&binding))
                    .collect()
            };
            raw.push(RawAction {
                schema: si,
                binding: binding.clone(),
                pre_pos: keys(&pre, true),
                pre_neg: keys(&pre, false),
                add: keys(&eff, true),
                del: keys(&eff, false),
            });
        }
        if n == 0 {
            raw.push(RawAction {
                schema: si,
                binding: Vec::new(),
                pre_pos: pre.iter().filter(|l| l.positive && !l.is_static).map(|l| l.key(&[])).collect(),
                pre_neg: pre.iter().filter(|l| !l.positive && !l.is_static).map(|l| l.key(&[])).collect(),
                add: eff.iter().filter(|l| l.positive && !l.is_static).map(|l| l.key(&[])).collect(),
                del: eff.iter().filter(|l| !l.positive && !l.is_static).map(|l| l.key(&[])).collect(),
            });
        }
    }

    // relaxed reachability: drop actions whose positive preconditions can never hold
    let mut reach: HashSet<Key> = init_keys.iter().filter(|k| !is_static(k)).cloned().collect();
    let mut live = vec![false; raw.len()];
    loop {
        let mut grew = false;
        for (i, r) in raw.iter().enumerate() {
            if !live[i] && r.pre_pos.iter().all(|p| reach.contains(p)) {
                live[i] = true;
                for a in &r.add {
                    grew |= reach.insert(a.clone());
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut goal_keys = Vec::new();
    for g in &problem.goal {
        let k = key_of(g)?;
        if is_static(&k) {
            if !init_keys.contains(&k) {
                return None;
            }
        } else if reach.contains(&k) {
            goal_keys.push(k);
        } else {
            return None;
        }
    }

    let mut facts: Vec<Key> = reach.into_iter().collect();
    facts.sort();
    let fact_ix: HashMap<&Key, usize> = facts.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let index = |k: &Key| fact_ix.get(k).copied();
    let words = facts.len().div_ceil(64).max(1);
    let mut init = vec![0u64; words].into_boxed_slice();
    for k in init_keys.iter().filter(|k| !is_static(k)) {
        set(&mut init, index(k).unwrap(), true);
    }
    let actions = raw
        .into_iter()
        .zip(live)
        .filter(|(_, l)| *l)
        .map(|(r, _)| {
            let schema = &domain.schemas[r.schema];
            let args: Vec<String> = r.binding.iter().map(|&i| consts[i as usize].to_string()).collect();
            let skill_args: Vec<&str> = args[..schema.verb.arity()].iter().map(String::as_str).collect();
            Grounded {
                pre_pos: r.pre_pos.iter().map(|k| index(k).unwrap()).collect(),
                pre_neg: r.pre_neg.iter().filter_map(index).collect(),
                add: r.add.iter().map(|k| index(k).unwrap()).collect(),
                del: r.del.iter().filter_map(index).collect(),
                name: GroundAction {
                    schema: schema.name.clone(),
                    skill: SkillAction::from_parts(schema.verb, &skill_args).expect("arity checked at parse"),
                    args,
                },
            }
        })
        .collect();
    let goal = goal_keys.iter().map(|k| index(k).unwrap()).collect();
    Some(Task { actions, init, goal })
}

/// Goal atoms that exclude each other; such goals are unsatisfiable.
fn has_mutex_goal(domain: &DomainModel, goal: &[Atom]) -> bool {
    domain.unary_mutexes().iter().any(|(p, q)| {
        goal.iter().any(|a| {
            a.pred == *p && goal.iter().any(|b| b.pred == *q && b.args == a.args)
        })
    })
}

/// A* with h = ceil(unmet goal atoms / k), where k is the most goal atoms a
/// single action adds. Each step removes at most k unmet atoms, so the
/// heuristic is admissible and consistent and the first goal popped is at
/// minimal depth.
pub fn search(domain: &DomainModel, problem: &ProblemInstance, budget: usize) -> Option<Vec<GroundAction>> {
    if problem.goal_satisfied_initially() {
        return Some(Vec::new());
    }
    if has_mutex_goal(domain, &problem.goal) {
        return None;
    }
    let task = compile(domain, problem)?;
    let k = task
        .actions
        .iter()
        .map(|a| a.add.iter().filter(|f| task.goal.contains(f)).count())
        .max()
        .unwrap_or(1)
        .max(1);
    let h = |s: &[u64]| task.goal.iter().filter(|&&g| !has(s, g)).count().div_ceil(k);

    struct Node {
        state: Bits,
        parent: usize,
        action: usize,
        g: usize,
    }
    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: usize::MAX,
        action: usize::MAX,
        g: 0,
    }];
    let mut best: HashMap<Bits, usize> = HashMap::new();
    best.insert(task.init.clone(), 0);
    let mut open = BinaryHeap::new();
    let mut seq = 0usize;
    open.push(Reverse((h(&task.init), h(&task.init), seq, 0usize)));
    let mut expanded = 0;

    while let Some(Reverse((_, hv, _, idx))) = open.pop() {
        let g = nodes[idx].g;
        if best.get(&nodes[idx].state).is_some_and(|&b| b < g) {
            continue;
        }
        if hv == 0 {
            let mut steps = Vec::new();
            let mut i = idx;
            while nodes[i].parent != usize::MAX {
                steps.push(task.actions[nodes[i].action].name.clone());
                i = nodes[i].parent;
            }
            steps.reverse();
            return Some(steps);
        }
        expanded += 1;
        if expanded > budget {
            return None;
        }
        for (ai, a) in task.actions.iter().enumerate() {
            let s = &nodes[idx].state;
            if !a.pre_pos.iter().all(|&f| has(s, f)) || a.pre_neg.iter().any(|&f| has(s, f)) {
                continue;
            }
            let mut next = s.clone();
            for &f in &a.del {
                set(&mut next, f, false);
            }
            for &f in &a.add {
                set(&mut next, f, true);
            }
            if best.get(&next).is_some_and(|&b| b <= g + 1) {
                continue;
            }
            best.insert(next.clone(), g + 1);
            let hn = h(&next);
            seq += 1;
            nodes.push(Node {
                state: next,
                parent: idx,
                action: ai,
                g: g + 1,
            });
            open.push(Reverse((g + 1 + hn, hn, seq, nodes.len() - 1)));
        }
    }
    None
}

/// Every grounded schema applicable in `problem.init`, with the successor
/// fact set. Used to cross-check the domain against the world rules.
pub fn successors(domain: &DomainModel, problem: &ProblemInstance) -> Vec<(GroundAction, BTreeSet<Atom>)> {
    let mut consts: BTreeSet<String> = problem.objects.iter().cloned().collect();
    for a in &problem.init {
        consts.extend(a.args.iter().cloned());
    }
    let consts: Vec<String> = consts.into_iter().collect();
    // plain cartesian enumeration, kept independent of `compile`
    let mut bindings: Vec<(Vec<usize>, &Schema)> = Vec::new();
    for schema in &domain.schemas {
        let mut partial: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in &schema.params {
            partial = partial
                .into_iter()
                .flat_map(|b| {
                    (0..consts.len()).map(move |c| {
                        let mut b = b.clone();
                        b.push(c);
                        b
                    })
                })
                .collect();
        }
        bindings.extend(partial.into_iter().map(|b| (b, schema)));
    }
    let mut out = Vec::new();
    for (binding, schema) in bindings {
        let sub = |a: &Atom| substitute(a, &schema.params, &binding, &consts);
        if !schema.pre.iter().all(|l| problem.init.contains(&sub(&l.atom)) == l.positive) {
            continue;
        }
        let mut next = problem.init.clone();
        for l in schema.effects.iter().filter(|l| !l.positive) {
            next.remove(&sub(&l.atom));
        }
        for l in schema.effects.iter().filter(|l| l.positive) {
            next.insert(sub(&l.atom));
        }
        let args: Vec<String> = binding.iter().map(|&i| consts[i].clone()).collect();
        let skill_args: Vec<&str> = args[..schema.verb.arity()].iter().map(String::as_str).collect();
        out.push((
            GroundAction {
                schema: schema.name.clone(),
                skill: SkillAction::from_parts(schema.verb, &skill_args).expect("arity checked at parse"),
                args,
            },
            next,
        ));
    }
    out
}

/// Minimal-length plan as world skills, without a trailing `Done`.
pub fn solve(domain: &DomainModel, problem: &ProblemInstance, budget: usize) -> Option<Plan> {
    let steps = search(domain, problem, budget)?;
    Some(
        Plan::new(steps.into_iter().map(|g| g.skill).collect(), Provenance::Oracle)
            .expect("schemas never lower to Done"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::planners::lower::{goal_atoms, lower_task, problem_for};
    use crate::world::{check_goal, execute_plan, load_scene, TaskGoal};

    fn kitchen() -> crate::world::WorldState {
        load_scene(&assets::scene("kitchen_1").unwrap()).unwrap()
    }

    #[test]
    fn satisfied_goal_gives_empty_plan() {
        let s = kitchen();
        let goal = TaskGoal::PickPlace {
            target: "tomato".into(),
            destination: "CounterTop".into(),
        };
        let p = solve(DomainModel::household(), &lower_task(&s, &goal), 1000).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn heat_place_plan_executes() {
        let s = kitchen();
        let goal = TaskGoal::HeatPlace {
            target: "potato".into(),
            destination: "DiningTable".into(),
        };
        let p = solve(DomainModel::household(), &lower_task(&s, &goal), DEFAULT_SEARCH_BUDGET).unwrap();
        // go, pick, go, heat, go, put
        assert_eq!(p.len(), 6, "{:?}", p.steps());
        let t = execute_plan(&s, p.steps(), 30);
        assert!(!t.failed());
        assert!(check_goal(&t.final_state, &goal).unwrap());
    }

    #[test]
    fn heated_and_cooled_is_unsatisfiable() {
        let s = kitchen();
        let mut g = goal_atoms(&TaskGoal::HeatPlace {
            target: "potato".into(),
            destination: "DiningTable".into(),
        });
        g.push(Atom::new("cooled", &["potato"]));
        assert!(solve(DomainModel::household(), &problem_for(&s, g), DEFAULT_SEARCH_BUDGET).is_none());
    }

    #[test]
    fn domain_matches_world_on_random_walks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (name, _) in assets::SCENES {
            let mut s = load_scene(&assets::scene(name).unwrap()).unwrap();
            for _ in 0..40 {
                let problem = problem_for(&s, vec![]);
                let mut from_domain: Vec<(SkillAction, BTreeSet<Atom>)> = successors(DomainModel::household(), &problem)
                    .into_iter()
                    .map(|(g, facts)| (g.skill, facts))
                    .collect();
                from_domain.sort();
                from_domain.dedup();
                let mut from_world: Vec<(SkillAction, BTreeSet<Atom>)> = s
                    .available_actions()
                    .into_iter()
                    .filter(|a| *a != SkillAction::Done)
                    .map(|a| {
                        let next = s.apply_action(&a).unwrap();
                        (a, crate::planners::lower::state_facts(&next))
                    })
                    .collect();
                from_world.sort();
                assert_eq!(from_domain, from_world, "{name} at {s:?}");
                let opts = s.available_actions();
                s = s.apply_action(&opts[rng.gen_range(0..opts.len())]).unwrap();
            }
        }
    }

    #[test]
    fn unknown_object_is_unreachable() {
        let s = kitchen();
        let g = vec![Atom::new("holding", &["banana"])];
        assert!(solve(DomainModel::household(), &problem_for(&s, g), 100).is_none());
    }
}
