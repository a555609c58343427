use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::kinds::{Category, Properties};
use super::state::{Id, Location, StateFlags, WorldState};
use super::WorldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verb {
    GoTo,
    PickUp,
    PutOn,
    PutIn,
    Open,
    Close,
    ToggleOn,
    ToggleOff,
    Heat,
    Cool,
    Clean,
    Slice,
    Done,
}

impl Verb {
    pub const ALL: [Verb; 13] = [
        Verb::GoTo,
        Verb::PickUp,
        Verb::PutOn,
        Verb::PutIn,
        Verb::Open,
        Verb::Close,
        Verb::ToggleOn,
        Verb::ToggleOff,
        Verb::Heat,
        Verb::Cool,
        Verb::Clean,
        Verb::Slice,
        Verb::Done,
    ];

    pub fn arity(self) -> usize {
        match self {
            Verb::Done => 0,
            Verb::PutOn | Verb::PutIn => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verb::GoTo => "GoTo",
            Verb::PickUp => "PickUp",
            Verb::PutOn => "PutOn",
            Verb::PutIn => "PutIn",
            Verb::Open => "Open",
            Verb::Close => "Close",
            Verb::ToggleOn => "ToggleOn",
            Verb::ToggleOff => "ToggleOff",
            Verb::Heat => "Heat",
            Verb::Cool => "Cool",
            Verb::Clean => "Clean",
            Verb::Slice => "Slice",
            Verb::Done => "Done",
        }
    }
}

/// A grounded skill. Variant order is the canonical sort order of option lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkillAction {
    GoTo(Id),
    PickUp(Id),
    PutOn(Id, Id),
    PutIn(Id, Id),
    Open(Id),
    Close(Id),
    ToggleOn(Id),
    ToggleOff(Id),
    Heat(Id),
    Cool(Id),
    Clean(Id),
    Slice(Id),
    Done,
}

impl SkillAction {
    pub fn verb(&self) -> Verb {
        match self {
            SkillAction::GoTo(_) => Verb::GoTo,
            SkillAction::PickUp(_) => Verb::PickUp,
            SkillAction::PutOn(..) => Verb::PutOn,
            SkillAction::PutIn(..) => Verb::PutIn,
            SkillAction::Open(_) => Verb::Open,
            SkillAction::Close(_) => Verb::Close,
            SkillAction::ToggleOn(_) => Verb::ToggleOn,
            SkillAction::ToggleOff(_) => Verb::ToggleOff,
            SkillAction::Heat(_) => Verb::Heat,
            SkillAction::Cool(_) => Verb::Cool,
            SkillAction::Clean(_) => Verb::Clean,
            SkillAction::Slice(_) => Verb::Slice,
            SkillAction::Done => Verb::Done,
        }
    }

    /// Arguments in positional order.
    pub fn args(&self) -> Vec<&str> {
        match self {
            SkillAction::PutOn(a, b) | SkillAction::PutIn(a, b) => vec![a, b],
            SkillAction::Done => vec![],
            SkillAction::GoTo(a)
            | SkillAction::PickUp(a)
            | SkillAction::Open(a)
            | SkillAction::Close(a)
            | SkillAction::ToggleOn(a)
            | SkillAction::ToggleOff(a)
            | SkillAction::Heat(a)
            | SkillAction::Cool(a)
            | SkillAction::Clean(a)
            | SkillAction::Slice(a) => vec![a],
        }
    }

    pub fn mentions(&self, id: &str) -> bool {
        self.args().contains(&id)
    }

    pub fn from_parts(verb: Verb, args: &[&str]) -> Result<Self, WorldError> {
        if args.len() != verb.arity() {
            return Err(WorldError::ActionSyntax(format!(
                "{} takes {} argument(s), got {}",
                verb.as_str(),
                verb.arity(),
                args.len()
            )));
        }
        let a = |i: usize| -> Id { args[i].into() };
        Ok(match verb {
            Verb::GoTo => SkillAction::GoTo(a(0)),
            Verb::PickUp => SkillAction::PickUp(a(0)),
            Verb::PutOn => SkillAction::PutOn(a(0), a(1)),
            Verb::PutIn => SkillAction::PutIn(a(0), a(1)),
            Verb::Open => SkillAction::Open(a(0)),
            Verb::Close => SkillAction::Close(a(0)),
            Verb::ToggleOn => SkillAction::ToggleOn(a(0)),
            Verb::ToggleOff => SkillAction::ToggleOff(a(0)),
            Verb::Heat => SkillAction::Heat(a(0)),
            Verb::Cool => SkillAction::Cool(a(0)),
            Verb::Clean => SkillAction::Clean(a(0)),
            Verb::Slice => SkillAction::Slice(a(0)),
            Verb::Done => SkillAction::Done,
        })
    }
}

impl fmt::Display for SkillAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let SkillAction::Done = self {
            return f.write_str("Done");
        }
        write!(f, "{}({})", self.verb().as_str(), self.args().join(", "))
    }
}

impl FromStr for SkillAction {
    type Err = WorldError;

    /// Parses the `Verb(arg, arg)` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = match s.find('(') {
            Some(i) => (&s[..i], Some(&s[i + 1..])),
            None => (s, None),
        };
        let verb = Verb::ALL
            .into_iter()
            .find(|v| v.as_str() == name)
            .ok_or_else(|| WorldError::ActionSyntax(format!("unknown verb `{name}`")))?;
        let args: Vec<&str> = match rest {
            None => vec![],
            Some(r) => {
                let inner = r
                    .strip_suffix(')')
                    .ok_or_else(|| WorldError::ActionSyntax(format!("missing `)` in `{s}`")))?;
                inner.split(',').map(str::trim).filter(|a| !a.is_empty()).collect()
            }
        };
        SkillAction::from_parts(verb, &args)
    }
}

impl Serialize for SkillAction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SkillAction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Why an action cannot be applied in the current state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotApplicable {
    UnknownId,
    NotAReceptacle,
    NotAnObject,
    AlreadyThere,
    HandsFull,
    HandsEmpty,
    NotHolding,
    WrongLocation,
    ReceptacleClosed,
    NotPickupable,
    NotOpenable,
    AlreadyOpen,
    AlreadyClosed,
    NotToggleable,
    AlreadyOn,
    AlreadyOff,
    NotASource,
    AlreadyDone,
    NotSliceable,
    NoUtensil,
    NotASurface,
    NotAContainer,
}

impl NotApplicable {
    pub fn as_str(self) -> &'static str {
        match self {
            NotApplicable::UnknownId => "unknown-id",
            NotApplicable::NotAReceptacle => "not-a-receptacle",
            NotApplicable::NotAnObject => "not-an-object",
            NotApplicable::AlreadyThere => "already-there",
            NotApplicable::HandsFull => "hands-full",
            NotApplicable::HandsEmpty => "hands-empty",
            NotApplicable::NotHolding => "not-holding",
            NotApplicable::WrongLocation => "wrong-location",
            NotApplicable::ReceptacleClosed => "receptacle-closed",
            NotApplicable::NotPickupable => "not-pickupable",
            NotApplicable::NotOpenable => "not-openable",
            NotApplicable::AlreadyOpen => "already-open",
            NotApplicable::AlreadyClosed => "already-closed",
            NotApplicable::NotToggleable => "not-toggleable",
            NotApplicable::AlreadyOn => "already-on",
            NotApplicable::AlreadyOff => "already-off",
            NotApplicable::NotASource => "not-a-source",
            NotApplicable::AlreadyDone => "already-done",
            NotApplicable::NotSliceable => "not-sliceable",
            NotApplicable::NoUtensil => "no-utensil",
            NotApplicable::NotASurface => "not-a-surface",
            NotApplicable::NotAContainer => "not-a-container",
        }
    }
}

impl fmt::Display for NotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

type Check = Result<(), NotApplicable>;

fn ensure(cond: bool, why: NotApplicable) -> Check {
    if cond {
        Ok(())
    } else {
        Err(why)
    }
}

impl WorldState {
    fn at(&self, receptacle: &str) -> bool {
        self.agent.location.as_deref() == Some(receptacle)
    }

    /// The object rests directly on an accessible receptacle the agent is at.
    fn reachable_on_receptacle(&self, id: &str) -> Check {
        match &self.objects[id].location {
            Location::Receptacle(r) => {
                ensure(self.at(r), NotApplicable::WrongLocation)?;
                ensure(self.receptacles[r].is_accessible(), NotApplicable::ReceptacleClosed)
            }
            _ => Err(NotApplicable::WrongLocation),
        }
    }

    fn object_check(&self, id: &str) -> Check {
        if self.objects.contains_key(id) {
            Ok(())
        } else if self.receptacles.contains_key(id) {
            Err(NotApplicable::NotAnObject)
        } else {
            Err(NotApplicable::UnknownId)
        }
    }

    fn receptacle_check(&self, id: &str) -> Check {
        if self.receptacles.contains_key(id) {
            Ok(())
        } else if self.objects.contains_key(id) {
            Err(NotApplicable::NotAReceptacle)
        } else {
            Err(NotApplicable::UnknownId)
        }
    }

    fn holding_check(&self, id: &str) -> Check {
        match self.agent.holding.as_deref() {
            Some(h) if h == id => Ok(()),
            Some(_) => Err(NotApplicable::NotHolding),
            None => Err(NotApplicable::HandsEmpty),
        }
    }

    /// Applicability of an action in this state, without building the successor.
    pub fn check_applicable(&self, action: &SkillAction) -> Check {
        use NotApplicable as N;
        match action {
            SkillAction::Done => Ok(()),
            SkillAction::GoTo(r) => {
                self.receptacle_check(r)?;
                ensure(!self.at(r), N::AlreadyThere)
            }
            SkillAction::PickUp(o) => {
                self.object_check(o)?;
                let obj = &self.objects[&**o];
                ensure(obj.kind.has(Properties::PICKUPABLE), N::NotPickupable)?;
                ensure(self.agent.holding.is_none(), N::HandsFull)?;
                match &obj.location {
                    Location::Receptacle(_) => self.reachable_on_receptacle(o),
                    Location::Inside(c) => self.reachable_on_receptacle(c),
                    Location::Held | Location::Floor => Err(N::WrongLocation),
                }
            }
            SkillAction::PutOn(o, r) => {
                self.object_check(o)?;
                self.receptacle_check(r)?;
                ensure(
                    self.receptacles[&**r].kind.category == Category::Furniture,
                    N::NotASurface,
                )?;
                self.holding_check(o)?;
                ensure(self.at(r), N::WrongLocation)
            }
            SkillAction::PutIn(o, p) => {
                self.object_check(o)?;
                if let Some(rec) = self.receptacles.get(&**p) {
                    ensure(rec.kind.category == Category::Receptacle, N::NotAContainer)?;
                    self.holding_check(o)?;
                    ensure(self.at(p), N::WrongLocation)?;
                    ensure(rec.is_accessible(), N::ReceptacleClosed)
                } else if let Some(carrier) = self.objects.get(&**p) {
                    ensure(carrier.kind.category == Category::Container, N::NotAContainer)?;
                    self.holding_check(o)?;
                    ensure(o != p, N::NotAContainer)?;
                    self.reachable_on_receptacle(p)
                } else {
                    Err(N::UnknownId)
                }
            }
            SkillAction::Open(r) | SkillAction::Close(r) => {
                self.receptacle_check(r)?;
                let rec = &self.receptacles[&**r];
                ensure(rec.kind.has(Properties::OPENABLE), N::NotOpenable)?;
                ensure(self.at(r), N::WrongLocation)?;
                if matches!(action, SkillAction::Open(_)) {
                    ensure(!rec.is_open(), N::AlreadyOpen)
                } else {
                    ensure(rec.is_open(), N::AlreadyClosed)
                }
            }
            SkillAction::ToggleOn(x) | SkillAction::ToggleOff(x) => {
                self.object_check(x)?;
                let obj = &self.objects[&**x];
                ensure(obj.kind.has(Properties::TOGGLEABLE), N::NotToggleable)?;
                self.reachable_on_receptacle(x)?;
                let on = obj.state.contains(StateFlags::TOGGLED_ON);
                if matches!(action, SkillAction::ToggleOn(_)) {
                    ensure(!on, N::AlreadyOn)
                } else {
                    ensure(on, N::AlreadyOff)
                }
            }
            SkillAction::Heat(o) | SkillAction::Cool(o) | SkillAction::Clean(o) => {
                self.object_check(o)?;
                let (source, done) = match action {
                    SkillAction::Heat(_) => (Properties::HEAT_SOURCE, StateFlags::HEATED),
                    SkillAction::Cool(_) => (Properties::COOL_SOURCE, StateFlags::COOLED),
                    _ => (Properties::CLEAN_SOURCE, StateFlags::CLEANED),
                };
                let obj = &self.objects[&**o];
                ensure(obj.kind.has(Properties::PICKUPABLE), N::NotPickupable)?;
                ensure(!obj.state.contains(done), N::AlreadyDone)?;
                let here = self.agent.location.as_ref().ok_or(N::WrongLocation)?;
                ensure(self.receptacles[here].kind.has(source), N::NotASource)?;
                let in_source = matches!(&obj.location, Location::Receptacle(r) if r == here);
                let held = self.agent.holding.as_deref() == Some(&**o);
                ensure(in_source || held, N::WrongLocation)
            }
            SkillAction::Slice(o) => {
                self.object_check(o)?;
                let obj = &self.objects[&**o];
                ensure(obj.kind.has(Properties::SLICEABLE), N::NotSliceable)?;
                ensure(!obj.state.contains(StateFlags::SLICED), N::AlreadyDone)?;
                let utensil = self
                    .agent
                    .holding
                    .as_ref()
                    .is_some_and(|h| self.objects[h].kind.category == Category::Utensil);
                ensure(utensil, N::NoUtensil)?;
                self.reachable_on_receptacle(o)
            }
        }
    }

    /// Applies one skill, returning the successor. On error `self` is untouched.
    pub fn apply_action(&self, action: &SkillAction) -> Result<WorldState, NotApplicable> {
        self.check_applicable(action)?;
        let mut next = self.clone();
        next.step_count += 1;
        match action {
            SkillAction::Done => {}
            SkillAction::GoTo(r) => next.agent.location = Some(r.clone()),
            SkillAction::PickUp(o) => {
                next.object_mut(o).location = Location::Held;
                next.agent.holding = Some(o.clone());
            }
            SkillAction::PutOn(o, r) => {
                next.object_mut(o).location = Location::Receptacle(r.clone());
                next.agent.holding = None;
            }
            SkillAction::PutIn(o, p) => {
                next.object_mut(o).location = if self.receptacles.contains_key(&**p) {
                    Location::Receptacle(p.clone())
                } else {
                    Location::Inside(p.clone())
                };
                next.agent.holding = None;
            }
            SkillAction::Open(r) => next.receptacle_mut(r).state.insert(StateFlags::OPEN),
            SkillAction::Close(r) => next.receptacle_mut(r).state.remove(StateFlags::OPEN),
            SkillAction::ToggleOn(x) => next.object_mut(x).state.insert(StateFlags::TOGGLED_ON),
            SkillAction::ToggleOff(x) => next.object_mut(x).state.remove(StateFlags::TOGGLED_ON),
            SkillAction::Heat(o) => {
                let s = &mut next.object_mut(o).state;
                s.insert(StateFlags::HEATED);
                s.remove(StateFlags::COOLED);
            }
            SkillAction::Cool(o) => {
                let s = &mut next.object_mut(o).state;
                s.insert(StateFlags::COOLED);
                s.remove(StateFlags::HEATED);
            }
            SkillAction::Clean(o) => next.object_mut(o).state.insert(StateFlags::CLEANED),
            SkillAction::Slice(o) => next.object_mut(o).state.insert(StateFlags::SLICED),
        }
        Ok(next)
    }

    /// Every grounded action over this scene's ids, applicable or not.
    pub fn all_groundings(&self) -> Vec<SkillAction> {
        let recs: Vec<&Id> = self.receptacles.keys().collect();
        let objs: Vec<&Id> = self.objects.keys().collect();
        let mut out = Vec::new();
        for r in &recs {
            out.push(SkillAction::GoTo((*r).clone()));
            out.push(SkillAction::Open((*r).clone()));
            out.push(SkillAction::Close((*r).clone()));
        }
        for o in &objs {
            let o = (*o).clone();
            out.push(SkillAction::PickUp(o.clone()));
            out.push(SkillAction::ToggleOn(o.clone()));
            out.push(SkillAction::ToggleOff(o.clone()));
            out.push(SkillAction::Heat(o.clone()));
            out.push(SkillAction::Cool(o.clone()));
            out.push(SkillAction::Clean(o.clone()));
            out.push(SkillAction::Slice(o.clone()));
            for r in &recs {
                out.push(SkillAction::PutOn(o.clone(), (*r).clone()));
                out.push(SkillAction::PutIn(o.clone(), (*r).clone()));
            }
            for c in &objs {
                out.push(SkillAction::PutIn(o.clone(), (*c).clone()));
            }
        }
        out.push(SkillAction::Done);
        out.sort();
        out
    }

    /// The constrained option set: applicable actions in canonical order,
    /// always ending with `Done`.
    pub fn available_actions(&self) -> Vec<SkillAction> {
        let mut set = BTreeSet::new();
        set.insert(SkillAction::Done);
        let objs: Vec<&Id> = self.objects.keys().collect();
        for r in self.receptacles.keys() {
            for a in [
                SkillAction::GoTo(r.clone()),
                SkillAction::Open(r.clone()),
                SkillAction::Close(r.clone()),
            ] {
                if self.check_applicable(&a).is_ok() {
                    set.insert(a);
                }
            }
        }
        for o in &objs {
            let o = (*o).clone();
            for a in [
                SkillAction::PickUp(o.clone()),
                SkillAction::ToggleOn(o.clone()),
                SkillAction::ToggleOff(o.clone()),
                SkillAction::Heat(o.clone()),
                SkillAction::Cool(o.clone()),
                SkillAction::Clean(o.clone()),
                SkillAction::Slice(o.clone()),
            ] {
                if self.check_applicable(&a).is_ok() {
                    set.insert(a);
                }
            }
        }
        if let Some(h) = &self.agent.holding {
            let places = self.receptacles.keys().chain(self.objects.keys());
            for p in places {
                for a in [
                    SkillAction::PutOn(h.clone(), p.clone()),
                    SkillAction::PutIn(h.clone(), p.clone()),
                ] {
                    if self.check_applicable(&a).is_ok() {
                        set.insert(a);
                    }
                }
            }
        }
        set.into_iter().collect()
    }
}
