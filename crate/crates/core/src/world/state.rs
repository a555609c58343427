use std::collections::BTreeMap;
use std::sync::Arc;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

use super::kinds::{ObjectKind, Properties};

/// Entity identifier shared by objects and receptacles.
pub type Id = Arc<str>;

bitflags! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
    pub struct StateFlags: u8 {
        const HEATED = 1;
        const COOLED = 1 << 1;
        const CLEANED = 1 << 2;
        const SLICED = 1 << 3;
        const TOGGLED_ON = 1 << 4;
        const OPEN = 1 << 5;
    }
}

/// Serialized spelling of a single state flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFlag {
    Heated,
    Cooled,
    Cleaned,
    Sliced,
    ToggledOn,
    Open,
}

impl StateFlag {
    pub const ALL: [StateFlag; 6] = [
        StateFlag::Heated,
        StateFlag::Cooled,
        StateFlag::Cleaned,
        StateFlag::Sliced,
        StateFlag::ToggledOn,
        StateFlag::Open,
    ];

    pub fn bit(self) -> StateFlags {
        match self {
            StateFlag::Heated => StateFlags::HEATED,
            StateFlag::Cooled => StateFlags::COOLED,
            StateFlag::Cleaned => StateFlags::CLEANED,
            StateFlag::Sliced => StateFlags::SLICED,
            StateFlag::ToggledOn => StateFlags::TOGGLED_ON,
            StateFlag::Open => StateFlags::OPEN,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StateFlag::Heated => "heated",
            StateFlag::Cooled => "cooled",
            StateFlag::Cleaned => "cleaned",
            StateFlag::Sliced => "sliced",
            StateFlag::ToggledOn => "toggled_on",
            StateFlag::Open => "open",
        }
    }
}

impl StateFlags {
    pub fn to_list(self) -> Vec<StateFlag> {
        StateFlag::ALL
            .into_iter()
            .filter(|f| self.contains(f.bit()))
            .collect()
    }

    pub fn from_list(flags: &[StateFlag]) -> Self {
        flags.iter().fold(StateFlags::empty(), |acc, f| acc | f.bit())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    /// Directly in or on a scene receptacle.
    Receptacle(Id),
    /// Inside a portable container object.
    Inside(Id),
    Held,
    Floor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectInstance {
    pub id: Id,
    pub kind: &'static ObjectKind,
    pub location: Location,
    pub state: StateFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Receptacle {
    pub id: Id,
    pub kind: &'static ObjectKind,
    pub state: StateFlags,
}

impl Receptacle {
    pub fn is_open(&self) -> bool {
        self.state.contains(StateFlags::OPEN)
    }

    /// Contents can be reached: not openable, or currently open.
    pub fn is_accessible(&self) -> bool {
        !self.kind.has(Properties::OPENABLE) || self.is_open()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Agent {
    /// `None` until the first `GoTo`.
    pub location: Option<Id>,
    pub holding: Option<Id>,
}

/// Immutable symbolic household snapshot. Transitions return new values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldState {
    pub(crate) scene_id: Arc<str>,
    pub(crate) receptacles: BTreeMap<Id, Receptacle>,
    pub(crate) objects: BTreeMap<Id, ObjectInstance>,
    pub(crate) agent: Agent,
    pub(crate) step_count: u32,
}

impl WorldState {
    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectInstance> {
        self.objects.values()
    }

    pub fn receptacles(&self) -> impl Iterator<Item = &Receptacle> {
        self.receptacles.values()
    }

    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects.get(id)
    }

    pub fn receptacle(&self, id: &str) -> Option<&Receptacle> {
        self.receptacles.get(id)
    }

    pub fn agent(&self) -> &Agent {
        &self.agent
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    /// Same configuration with the step counter replaced; search code keys
    /// visited sets on configurations, not on how many steps led there.
    pub fn with_step_count(mut self, steps: u32) -> Self {
        self.step_count = steps;
        self
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.objects.contains_key(id) || self.receptacles.contains_key(id)
    }

    /// The receptacle an object ultimately rests in, following one carrier hop.
    pub fn resting_receptacle(&self, id: &str) -> Option<&Id> {
        match &self.objects.get(id)?.location {
            Location::Receptacle(r) => Some(r),
            Location::Inside(c) => match &self.objects.get(c)?.location {
                Location::Receptacle(r) => Some(r),
                _ => None,
            },
            _ => None,
        }
    }

    pub(crate) fn object_mut(&mut self, id: &str) -> &mut ObjectInstance {
        self.objects.get_mut(id).expect("object id checked by caller")
    }

    pub(crate) fn receptacle_mut(&mut self, id: &str) -> &mut Receptacle {
        self.receptacles
            .get_mut(id)
            .expect("receptacle id checked by caller")
    }
}
