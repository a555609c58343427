//! Test-side oracles written from the documented world rules, sharing no
//! code with the simulator beyond the action syntax.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use reibench::world::{check_goal, Location, SkillAction, TaskGoal, Verb, WorldState};

/// What the rules need to know about a kind.
#[derive(Debug, Clone, Copy, Default)]
pub struct Traits {
    pub pickup: bool,
    pub toggle: bool,
    pub slice: bool,
    pub openable: bool,
    pub surface: bool,
    pub enclosure: bool,
    pub container: bool,
    pub utensil: bool,
    pub heat: bool,
    pub cool: bool,
    pub clean: bool,
}

pub fn traits(kind: &str) -> Traits {
    let t = Traits::default();
    match kind {
        "Apple" | "Tomato" | "Potato" | "Lettuce" | "Bread" => Traits { pickup: true, slice: true, ..t },
        "Egg" | "CellPhone" | "Laptop" | "RemoteControl" | "Watch" | "KeyChain" | "AlarmClock" | "Book"
        | "Pillow" | "Candle" | "Statue" | "TeddyBear" => Traits { pickup: true, ..t },
        "Mug" | "Cup" | "Bowl" | "Pot" | "Plate" | "Box" | "Vase" => Traits { pickup: true, container: true, ..t },
        "ButterKnife" | "Knife" | "Fork" | "Spoon" => Traits { pickup: true, utensil: true, ..t },
        "DeskLamp" | "FloorLamp" => Traits { toggle: true, ..t },
        "CounterTop" | "DiningTable" | "CoffeeTable" | "SideTable" | "Desk" | "Shelf" | "Dresser" | "Sofa" | "Bed"
        | "ArmChair" => Traits { surface: true, ..t },
        "Fridge" => Traits { enclosure: true, openable: true, cool: true, ..t },
        "Microwave" => Traits { enclosure: true, openable: true, heat: true, ..t },
        "SinkBasin" => Traits { enclosure: true, clean: true, ..t },
        "Cabinet" | "Drawer" => Traits { enclosure: true, openable: true, ..t },
        "GarbageCan" => Traits { enclosure: true, ..t },
        other => panic!("oracle has no traits for {other}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    On(String),
    In(String),
    Held,
    Floor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OState {
    pub objects: BTreeMap<String, (String, Place, BTreeSet<String>)>,
    pub receptacles: BTreeMap<String, (String, bool)>,
    pub at: Option<String>,
    pub hold: Option<String>,
    pub steps: u32,
}

impl OState {
    /// Builds the oracle state from raw scene JSON.
    pub fn from_scene_json(text: &str) -> OState {
        let v: serde_json::Value = serde_json::from_str(text).unwrap();
        let receptacles: BTreeMap<String, (String, bool)> = v["receptacles"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                let flags: Vec<&str> = r["state_flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
                (
                    r["id"].as_str().unwrap().to_string(),
                    (r["kind"].as_str().unwrap().to_string(), flags.contains(&"open")),
                )
            })
            .collect();
        let objects = v["objects"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| {
                let loc = o["location"].as_str().unwrap().to_string();
                let place = if loc == "floor" {
                    Place::Floor
                } else if receptacles.contains_key(&loc) {
                    Place::On(loc)
                } else {
                    Place::In(loc)
                };
                let flags = o["state_flags"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()).collect();
                (o["id"].as_str().unwrap().to_string(), (o["kind"].as_str().unwrap().to_string(), place, flags))
            })
            .collect();
        OState {
            objects,
            receptacles,
            at: None,
            hold: None,
            steps: 0,
        }
    }

    /// Reads the simulator's state through its public accessors.
    pub fn observe(s: &WorldState) -> OState {
        let flag_names = |f: reibench::world::StateFlags| -> BTreeSet<String> {
            let mut out = BTreeSet::new();
            for (bit, name) in [
                (reibench::world::StateFlags::HEATED, "heated"),
                (reibench::world::StateFlags::COOLED, "cooled"),
                (reibench::world::StateFlags::CLEANED, "cleaned"),
                (reibench::world::StateFlags::SLICED, "sliced"),
                (reibench::world::StateFlags::TOGGLED_ON, "toggled_on"),
                (reibench::world::StateFlags::OPEN, "open"),
            ] {
                if f.contains(bit) {
                    out.insert(name.to_string());
                }
            }
            out
        };
        OState {
            objects: s
                .objects()
                .map(|o| {
                    let place = match &o.location {
                        Location::Receptacle(r) => Place::On(r.to_string()),
                        Location::Inside(c) => Place::In(c.to_string()),
                        Location::Held => Place::Held,
                        Location::Floor => Place::Floor,
                    };
                    (o.id.to_string(), (o.kind.name.to_string(), place, flag_names(o.state)))
                })
                .collect(),
            receptacles: s
                .receptacles()
                .map(|r| (r.id.to_string(), (r.kind.name.to_string(), flag_names(r.state).contains("open"))))
                .collect(),
            at: s.agent().location.as_ref().map(|l| l.to_string()),
            hold: s.agent().holding.as_ref().map(|h| h.to_string()),
            steps: s.step_count(),
        }
    }

    fn rec_accessible(&self, r: &str) -> bool {
        let (kind, open) = &self.receptacles[r];
        !traits(kind).openable || *open
    }

    /// Object sits directly on the receptacle the agent stands at, and that
    /// receptacle's contents can be reached.
    fn within_reach(&self, o: &str) -> bool {
        match &self.objects[o].1 {
            Place::On(r) => self.at.as_deref() == Some(r) && self.rec_accessible(r),
            _ => false,
        }
    }

    fn has(&self, o: &str, flag: &str) -> bool {
        self.objects[o].2.contains(flag)
    }

    fn obj_traits(&self, o: &str) -> Traits {
        traits(&self.objects[o].0)
    }

    pub fn applicable(&self, a: &SkillAction) -> bool {
        let args = a.args();
        let is_obj = |x: &str| self.objects.contains_key(x);
        let is_rec = |x: &str| self.receptacles.contains_key(x);
        let holding = |x: &str| self.hold.as_deref() == Some(x);
        match a.verb() {
            Verb::Done => true,
            Verb::GoTo => is_rec(args[0]) && self.at.as_deref() != Some(args[0]),
            Verb::PickUp => {
                let o = args[0];
                is_obj(o)
                    && self.obj_traits(o).pickup
                    && self.hold.is_none()
                    && match &self.objects[o].1 {
                        Place::On(_) => self.within_reach(o),
                        Place::In(c) => self.within_reach(c),
                        _ => false,
                    }
            }
            Verb::PutOn => {
                let (o, r) = (args[0], args[1]);
                is_obj(o) && is_rec(r) && traits(&self.receptacles[r].0).surface && holding(o) && self.at.as_deref() == Some(r)
            }
            Verb::PutIn => {
                let (o, p) = (args[0], args[1]);
                if !is_obj(o) || !holding(o) {
                    return false;
                }
                if is_rec(p) {
                    traits(&self.receptacles[p].0).enclosure && self.at.as_deref() == Some(p) && self.rec_accessible(p)
                } else if is_obj(p) {
                    o != p && self.obj_traits(p).container && self.within_reach(p)
                } else {
                    false
                }
            }
            Verb::Open | Verb::Close => {
                let r = args[0];
                is_rec(r)
                    && traits(&self.receptacles[r].0).openable
                    && self.at.as_deref() == Some(r)
                    && (self.receptacles[r].1 == (a.verb() == Verb::Close))
            }
            Verb::ToggleOn | Verb::ToggleOff => {
                let x = args[0];
                is_obj(x)
                    && self.obj_traits(x).toggle
                    && self.within_reach(x)
                    && (self.has(x, "toggled_on") == (a.verb() == Verb::ToggleOff))
            }
            Verb::Heat | Verb::Cool | Verb::Clean => {
                let o = args[0];
                if !is_obj(o) || !self.obj_traits(o).pickup {
                    return false;
                }
                let flag = match a.verb() {
                    Verb::Heat => "heated",
                    Verb::Cool => "cooled",
                    _ => "cleaned",
                };
                let Some(here) = self.at.as_deref() else { return false };
                let t = traits(&self.receptacles[here].0);
                let source = match a.verb() {
                    Verb::Heat => t.heat,
                    Verb::Cool => t.cool,
                    _ => t.clean,
                };
                let placed = self.objects[o].1 == Place::On(here.to_string()) || holding(o);
                !self.has(o, flag) && source && placed
            }
            Verb::Slice => {
                let o = args[0];
                is_obj(o)
                    && self.obj_traits(o).slice
                    && !self.has(o, "sliced")
                    && self.hold.as_deref().is_some_and(|h| self.obj_traits(h).utensil)
                    && self.within_reach(o)
            }
        }
    }

    /// Successor state, or `None` when the action does not apply.
    pub fn step(&self, a: &SkillAction) -> Option<OState> {
        if !self.applicable(a) {
            return None;
        }
        let mut n = self.clone();
        n.steps += 1;
        let args: Vec<String> = a.args().into_iter().map(String::from).collect();
        match a.verb() {
            Verb::Done => {}
            Verb::GoTo => n.at = Some(args[0].clone()),
            Verb::PickUp => {
                n.objects.get_mut(&args[0]).unwrap().1 = Place::Held;
                n.hold = Some(args[0].clone());
            }
            Verb::PutOn => {
                n.objects.get_mut(&args[0]).unwrap().1 = Place::On(args[1].clone());
                n.hold = None;
            }
            Verb::PutIn => {
                let place = if n.receptacles.contains_key(&args[1]) {
                    Place::On(args[1].clone())
                } else {
                    Place::In(args[1].clone())
                };
                n.objects.get_mut(&args[0]).unwrap().1 = place;
                n.hold = None;
            }
            Verb::Open => n.receptacles.get_mut(&args[0]).unwrap().1 = true,
            Verb::Close => n.receptacles.get_mut(&args[0]).unwrap().1 = false,
            Verb::ToggleOn => {
                n.objects.get_mut(&args[0]).unwrap().2.insert("toggled_on".into());
            }
            Verb::ToggleOff => {
                n.objects.get_mut(&args[0]).unwrap().2.remove("toggled_on");
            }
            Verb::Heat | Verb::Cool => {
                let (set, clear) = if a.verb() == Verb::Heat { ("heated", "cooled") } else { ("cooled", "heated") };
                let f = &mut n.objects.get_mut(&args[0]).unwrap().2;
                f.insert(set.into());
                f.remove(clear);
            }
            Verb::Clean => {
                n.objects.get_mut(&args[0]).unwrap().2.insert("cleaned".into());
            }
            Verb::Slice => {
                n.objects.get_mut(&args[0]).unwrap().2.insert("sliced".into());
            }
        }
        Some(n)
    }

    /// Runs until the first inapplicable step or `Done`. Returns the final
    /// state and whether a step failed.
    pub fn run(&self, plan: &[SkillAction]) -> (OState, bool) {
        let mut s = self.clone();
        for a in plan {
            match s.step(a) {
                Some(n) => {
                    s = n;
                    if *a == SkillAction::Done {
                        break;
                    }
                }
                None => return (s, true),
            }
        }
        (s, false)
    }

    pub fn goal_holds(&self, goal: &TaskGoal) -> bool {
        let on = |o: &str, r: &str| self.objects[o].1 == Place::On(r.to_string());
        match goal {
            TaskGoal::PickPlace { target, destination } => on(target, destination),
            TaskGoal::StackPlace { target, carrier, destination } => {
                self.objects[target.as_str()].1 == Place::In(carrier.clone()) && on(carrier, destination)
            }
            TaskGoal::CleanPlace { target, destination } => self.has(target, "cleaned") && on(target, destination),
            TaskGoal::HeatPlace { target, destination } => self.has(target, "heated") && on(target, destination),
            TaskGoal::CoolPlace { target, destination } => self.has(target, "cooled") && on(target, destination),
            TaskGoal::ExamineInLight { target, light } => {
                self.hold.as_deref() == Some(target.as_str()) && self.has(light, "toggled_on")
            }
        }
    }

    /// Every syntactically possible grounding over this scene's ids.
    pub fn groundings(&self) -> Vec<SkillAction> {
        let recs: Vec<&str> = self.receptacles.keys().map(String::as_str).collect();
        let objs: Vec<&str> = self.objects.keys().map(String::as_str).collect();
        let mut out = vec![SkillAction::Done];
        let one = |v: Verb, x: &str| SkillAction::from_parts(v, &[x]).unwrap();
        for r in &recs {
            for v in [Verb::GoTo, Verb::Open, Verb::Close] {
                out.push(one(v, r));
            }
        }
        for o in &objs {
            for v in [Verb::PickUp, Verb::ToggleOn, Verb::ToggleOff, Verb::Heat, Verb::Cool, Verb::Clean, Verb::Slice] {
                out.push(one(v, o));
            }
            for p in recs.iter().chain(objs.iter()) {
                out.push(SkillAction::from_parts(Verb::PutOn, &[o, p]).unwrap());
                out.push(SkillAction::from_parts(Verb::PutIn, &[o, p]).unwrap());
            }
        }
        out
    }
}

/// Simulator state without the step counter, for visited sets.
fn state_key(s: &WorldState) -> OState {
    let mut o = OState::observe(s);
    o.steps = 0;
    o
}

/// Length of a shortest action sequence reaching `goal` through the
/// simulator's own transitions, or `None` within `max_depth`.
pub fn bfs_plan_length(initial: &WorldState, goal: &TaskGoal, max_depth: usize) -> Option<usize> {
    if check_goal(initial, goal).unwrap() {
        return Some(0);
    }
    let mut seen: HashSet<OState> = HashSet::new();
    seen.insert(state_key(initial));
    let mut queue = VecDeque::from([(initial.clone(), 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        if d == max_depth {
            continue;
        }
        for a in s.available_actions() {
            if a == SkillAction::Done {
                continue;
            }
            let n = s.apply_action(&a).unwrap();
            if check_goal(&n, goal).unwrap() {
                return Some(d + 1);
            }
            if seen.insert(state_key(&n)) {
                queue.push_back((n, d + 1));
            }
        }
    }
    None
}
