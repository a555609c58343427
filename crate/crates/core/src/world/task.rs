use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::{Location, StateFlags, WorldState};
use super::WorldError;

/// The six household task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    PickPlace,
    StackPlace,
    CleanPlace,
    HeatPlace,
    CoolPlace,
    ExamineInLight,
}

impl TaskKind {
    pub const ALL: [TaskKind; 6] = [
        TaskKind::PickPlace,
        TaskKind::StackPlace,
        TaskKind::CleanPlace,
        TaskKind::HeatPlace,
        TaskKind::CoolPlace,
        TaskKind::ExamineInLight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::PickPlace => "PickPlace",
            TaskKind::StackPlace => "StackPlace",
            TaskKind::CleanPlace => "CleanPlace",
            TaskKind::HeatPlace => "HeatPlace",
            TaskKind::CoolPlace => "CoolPlace",
            TaskKind::ExamineInLight => "ExamineInLight",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TaskKind::PickPlace => "Pick & Place",
            TaskKind::StackPlace => "Stack & Place",
            TaskKind::CleanPlace => "Clean & Place",
            TaskKind::HeatPlace => "Heat & Place",
            TaskKind::CoolPlace => "Cool & Place",
            TaskKind::ExamineInLight => "Examine in Light",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = WorldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| WorldError::UnknownTaskKind(s.to_string()))
    }
}

/// Ground-truth goal of an episode. Each variant carries exactly the fields
/// its task family needs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum TaskGoal {
    PickPlace { target: String, destination: String },
    StackPlace { target: String, carrier: String, destination: String },
    CleanPlace { target: String, destination: String },
    HeatPlace { target: String, destination: String },
    CoolPlace { target: String, destination: String },
    ExamineInLight { target: String, light: String },
}

impl TaskGoal {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskGoal::PickPlace { .. } => TaskKind::PickPlace,
            TaskGoal::StackPlace { .. } => TaskKind::StackPlace,
            TaskGoal::CleanPlace { .. } => TaskKind::CleanPlace,
            TaskGoal::HeatPlace { .. } => TaskKind::HeatPlace,
            TaskGoal::CoolPlace { .. } => TaskKind::CoolPlace,
            TaskGoal::ExamineInLight { .. } => TaskKind::ExamineInLight,
        }
    }

    pub fn target(&self) -> &str {
        match self {
            TaskGoal::PickPlace { target, .. }
            | TaskGoal::StackPlace { target, .. }
            | TaskGoal::CleanPlace { target, .. }
            | TaskGoal::HeatPlace { target, .. }
            | TaskGoal::CoolPlace { target, .. }
            | TaskGoal::ExamineInLight { target, .. } => target,
        }
    }

    pub fn destination(&self) -> Option<&str> {
        match self {
            TaskGoal::PickPlace { destination, .. }
            | TaskGoal::StackPlace { destination, .. }
            | TaskGoal::CleanPlace { destination, .. }
            | TaskGoal::HeatPlace { destination, .. }
            | TaskGoal::CoolPlace { destination, .. } => Some(destination),
            TaskGoal::ExamineInLight { .. } => None,
        }
    }

    pub fn carrier(&self) -> Option<&str> {
        match self {
            TaskGoal::StackPlace { carrier, .. } => Some(carrier),
            _ => None,
        }
    }

    pub fn light(&self) -> Option<&str> {
        match self {
            TaskGoal::ExamineInLight { light, .. } => Some(light),
            _ => None,
        }
    }

    /// Object ids the goal mentions, excluding receptacles: target, then
    /// carrier or light.
    pub fn object_ids(&self) -> Vec<&str> {
        let mut ids = vec![self.target()];
        ids.extend(self.carrier());
        ids.extend(self.light());
        ids
    }

    /// All ids the goal references, receptacles included.
    pub fn referenced_ids(&self) -> Vec<&str> {
        let mut ids = self.object_ids();
        ids.extend(self.destination());
        ids
    }
}

fn rests_in(state: &WorldState, id: &str, receptacle: &str) -> bool {
    matches!(&state.objects[id].location, Location::Receptacle(r) if &**r == receptacle)
}

/// Goal predicate. Pure; never mutates the state.
pub fn check_goal(state: &WorldState, goal: &TaskGoal) -> Result<bool, WorldError> {
    for id in goal.object_ids() {
        if state.object(id).is_none() {
            return Err(WorldError::UnknownId(id.to_string()));
        }
    }
    if let Some(d) = goal.destination() {
        if state.receptacle(d).is_none() {
            return Err(WorldError::UnknownId(d.to_string()));
        }
    }
    let flag = |id: &str, f: StateFlags| state.objects[id].state.contains(f);
    Ok(match goal {
        TaskGoal::PickPlace { target, destination } => rests_in(state, target, destination),
        TaskGoal::StackPlace { target, carrier, destination } => {
            matches!(&state.objects[target.as_str()].location, Location::Inside(c) if **c == **carrier)
                && rests_in(state, carrier, destination)
        }
        TaskGoal::CleanPlace { target, destination } => {
            flag(target, StateFlags::CLEANED) && rests_in(state, target, destination)
        }
        TaskGoal::HeatPlace { target, destination } => {
            flag(target, StateFlags::HEATED) && rests_in(state, target, destination)
        }
        TaskGoal::CoolPlace { target, destination } => {
            flag(target, StateFlags::COOLED) && rests_in(state, target, destination)
        }
        TaskGoal::ExamineInLight { target, light } => {
            state.agent.holding.as_deref() == Some(target.as_str())
                && flag(light, StateFlags::TOGGLED_ON)
        }
    })
}
