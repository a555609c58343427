//! Translation between world values and planning-domain values.

use std::collections::BTreeSet;

use super::domain::Atom;
use super::problem::ProblemInstance;
use crate::world::{Category, Location, Properties, StateFlags, TaskGoal, WorldState};

/// Initial facts describing a world state, static type facts included.
pub fn state_facts(state: &WorldState) -> BTreeSet<Atom> {
    let mut init = BTreeSet::new();
    let mut add = |p: &str, args: &[&str]| {
        init.insert(Atom::new(p, args));
    };
    for r in state.receptacles() {
        let id = &*r.id;
        add("receptacle", &[id]);
        match r.kind.category {
            Category::Furniture => add("surface", &[id]),
            _ => add("enclosure", &[id]),
        }
        if r.kind.has(Properties::OPENABLE) {
            add("openable", &[id]);
        } else {
            add("fixed", &[id]);
        }
        for (prop, pred) in [
            (Properties::HEAT_SOURCE, "heat-source"),
            (Properties::COOL_SOURCE, "cool-source"),
            (Properties::CLEAN_SOURCE, "clean-source"),
        ] {
            if r.kind.has(prop) {
                add(pred, &[id]);
            }
        }
        if r.is_open() {
            add("open", &[id]);
        }
    }
    for o in state.objects() {
        let id = &*o.id;
        add("object", &[id]);
        for (prop, pred) in [
            (Properties::PICKUPABLE, "pickupable"),
            (Properties::TOGGLEABLE, "toggleable"),
            (Properties::SLICEABLE, "sliceable"),
        ] {
            if o.kind.has(prop) {
                add(pred, &[id]);
            }
        }
        match o.kind.category {
            Category::Container => add("container", &[id]),
            Category::Utensil => add("utensil", &[id]),
            _ => {}
        }
        match &o.location {
            Location::Receptacle(r) => add("at", &[id, r]),
            Location::Inside(c) => add("inside", &[id, c]),
            Location::Held => add("holding", &[id]),
            Location::Floor => {}
        }
        for (flag, pred) in [
            (StateFlags::HEATED, "heated"),
            (StateFlags::COOLED, "cooled"),
            (StateFlags::CLEANED, "cleaned"),
            (StateFlags::SLICED, "sliced"),
            (StateFlags::TOGGLED_ON, "toggled-on"),
        ] {
            if o.state.contains(flag) {
                add(pred, &[id]);
            }
        }
    }
    let agent = state.agent();
    match &agent.location {
        Some(r) => add("agent-at", &[r]),
        None => add("agent-free", &[]),
    }
    if agent.holding.is_none() {
        add("hand-empty", &[]);
    }
    init
}

/// Goal atoms equivalent to the world's goal predicate.
pub fn goal_atoms(goal: &TaskGoal) -> Vec<Atom> {
    match goal {
        TaskGoal::PickPlace { target, destination } => vec![Atom::new("at", &[target, destination])],
        TaskGoal::StackPlace {
            target,
            carrier,
            destination,
        } => vec![
            Atom::new("inside", &[target, carrier]),
            Atom::new("at", &[carrier, destination]),
        ],
        TaskGoal::CleanPlace { target, destination } => vec![
            Atom::new("cleaned", &[target]),
            Atom::new("at", &[target, destination]),
        ],
        TaskGoal::HeatPlace { target, destination } => vec![
            Atom::new("heated", &[target]),
            Atom::new("at", &[target, destination]),
        ],
        TaskGoal::CoolPlace { target, destination } => vec![
            Atom::new("cooled", &[target]),
            Atom::new("at", &[target, destination]),
        ],
        TaskGoal::ExamineInLight { target, light } => vec![
            Atom::new("holding", &[target]),
            Atom::new("toggled-on", &[light]),
        ],
    }
}

/// Problem with every scene id declared, in sorted order.
pub fn problem_for(state: &WorldState, goal: Vec<Atom>) -> ProblemInstance {
    let mut objects: Vec<String> = state
        .receptacles()
        .map(|r| r.id.to_string())
        .chain(state.objects().map(|o| o.id.to_string()))
        .collect();
    objects.sort();
    ProblemInstance {
        objects,
        init: state_facts(state),
        goal,
    }
}

/// Problem whose solution reaches `goal` from `state`.
pub fn lower_task(state: &WorldState, goal: &TaskGoal) -> ProblemInstance {
    problem_for(state, goal_atoms(goal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::world::load_scene;

    #[test]
    fn kitchen_facts() {
        let s = load_scene(&assets::scene("kitchen_1").unwrap()).unwrap();
        let f = state_facts(&s);
        assert!(f.contains(&Atom::new("at", &["tomato", "CounterTop"])));
        assert!(f.contains(&Atom::new("openable", &["Fridge"])));
        assert!(f.contains(&Atom::new("fixed", &["SinkBasin"])));
        assert!(f.contains(&Atom::new("agent-free", &[])));
        assert!(f.contains(&Atom::new("container", &["bowl"])));
        assert!(!f.contains(&Atom::new("open", &["Fridge"])));
    }
}
