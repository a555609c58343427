use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kinds::{kind_by_name, Category, Properties};
use super::state::{Agent, Id, Location, ObjectInstance, Receptacle, StateFlag, StateFlags, WorldState};
use super::task::TaskKind;
use super::WorldError;

pub const FLOOR: &str = "floor";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    pub kind: String,
    /// A receptacle id, a container object id, or `"floor"`.
    pub location: String,
    #[serde(default)]
    pub state_flags: Vec<StateFlag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceptacleSpec {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub state_flags: Vec<StateFlag>,
}

/// On-disk scene description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub scene_id: String,
    pub objects: Vec<ObjectSpec>,
    pub receptacles: Vec<ReceptacleSpec>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SceneSpec {
    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        serde_json::from_str(text).map_err(|e| WorldError::SceneFormat(e.to_string()))
    }

    /// Canonical encoding: two-space pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self, WorldError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| WorldError::SceneFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Whether the scene has the appliance a task type needs.
    pub fn supports(&self, task: TaskKind) -> bool {
        let needed = match task {
            TaskKind::HeatPlace => Properties::HEAT_SOURCE,
            TaskKind::CoolPlace => Properties::COOL_SOURCE,
            TaskKind::CleanPlace => Properties::CLEAN_SOURCE,
            TaskKind::ExamineInLight => {
                return self.objects.iter().any(|o| {
                    kind_by_name(&o.kind).is_some_and(|k| k.has(Properties::TOGGLEABLE))
                })
            }
            TaskKind::StackPlace => {
                return self.objects.iter().any(|o| {
                    kind_by_name(&o.kind).is_some_and(|k| k.category == Category::Container)
                })
            }
            TaskKind::PickPlace => return true,
        };
        self.receptacles
            .iter()
            .any(|r| kind_by_name(&r.kind).is_some_and(|k| k.has(needed)))
    }
}

fn check_flags(id: &str, flags: StateFlags, props: Properties) -> Result<(), WorldError> {
    let bad = |flag: &str| WorldError::InvalidState {
        id: id.to_string(),
        reason: format!("{flag} not meaningful for this kind"),
    };
    if flags.contains(StateFlags::HEATED | StateFlags::COOLED) {
        return Err(WorldError::InvalidState {
            id: id.to_string(),
            reason: "heated and cooled are exclusive".into(),
        });
    }
    if flags.contains(StateFlags::OPEN) && !props.contains(Properties::OPENABLE) {
        return Err(bad("open"));
    }
    if flags.contains(StateFlags::TOGGLED_ON) && !props.contains(Properties::TOGGLEABLE) {
        return Err(bad("toggled_on"));
    }
    if flags.contains(StateFlags::SLICED) && !props.contains(Properties::SLICEABLE) {
        return Err(bad("sliced"));
    }
    Ok(())
}

/// Builds the initial world from a scene description.
pub fn load_scene(spec: &SceneSpec) -> Result<WorldState, WorldError> {
    let mut seen = HashSet::new();
    let mut receptacles = BTreeMap::new();
    for r in &spec.receptacles {
        if !valid_id(&r.id) {
            return Err(WorldError::InvalidId(r.id.clone()));
        }
        if !seen.insert(r.id.as_str()) {
            return Err(WorldError::DuplicateId(r.id.clone()));
        }
        let kind = kind_by_name(&r.kind).ok_or_else(|| WorldError::UnknownKind(r.kind.clone()))?;
        if !kind.is_receptacle() {
            return Err(WorldError::WrongCategory {
                id: r.id.clone(),
                expected: "receptacle",
            });
        }
        let state = StateFlags::from_list(&r.state_flags);
        if state.intersects(!StateFlags::OPEN) {
            return Err(WorldError::InvalidState {
                id: r.id.clone(),
                reason: "receptacles only carry the open flag".into(),
            });
        }
        check_flags(&r.id, state, kind.properties)?;
        let id: Id = Arc::from(r.id.as_str());
        receptacles.insert(id.clone(), Receptacle { id, kind, state });
    }

    let mut kinds = BTreeMap::new();
    for o in &spec.objects {
        if !valid_id(&o.id) {
            return Err(WorldError::InvalidId(o.id.clone()));
        }
        if !seen.insert(o.id.as_str()) {
            return Err(WorldError::DuplicateId(o.id.clone()));
        }
        let kind = kind_by_name(&o.kind).ok_or_else(|| WorldError::UnknownKind(o.kind.clone()))?;
        if kind.is_receptacle() {
            return Err(WorldError::WrongCategory {
                id: o.id.clone(),
                expected: "object",
            });
        }
        kinds.insert(o.id.as_str(), kind);
    }

    let mut objects = BTreeMap::new();
    for o in &spec.objects {
        let kind = kinds[o.id.as_str()];
        let location = if o.location == FLOOR {
            Location::Floor
        } else if let Some((rid, _)) = receptacles.get_key_value(o.location.as_str()) {
            Location::Receptacle(rid.clone())
        } else if let Some(ck) = kinds.get(o.location.as_str()) {
            if ck.category != Category::Container || o.location == o.id {
                return Err(WorldError::DanglingLocation {
                    object: o.id.clone(),
                    location: o.location.clone(),
                });
            }
            Location::Inside(Arc::from(o.location.as_str()))
        } else {
            return Err(WorldError::DanglingLocation {
                object: o.id.clone(),
                location: o.location.clone(),
            });
        };
        let state = StateFlags::from_list(&o.state_flags);
        check_flags(&o.id, state, kind.properties)?;
        let id: Id = Arc::from(o.id.as_str());
        objects.insert(id.clone(), ObjectInstance { id, kind, location, state });
    }

    // Carriers must rest directly on a receptacle so their contents stay reachable.
    for o in objects.values() {
        if let Location::Inside(c) = &o.location {
            if !matches!(objects[c].location, Location::Receptacle(_)) {
                return Err(WorldError::DanglingLocation {
                    object: o.id.to_string(),
                    location: c.to_string(),
                });
            }
        }
    }

    Ok(WorldState {
        scene_id: Arc::from(spec.scene_id.as_str()),
        receptacles,
        objects,
        agent: Agent::default(),
        step_count: 0,
    })
}

/// Inverse of [`load_scene`] for a state reachable from a scene; the agent is
/// not part of the file format.
pub fn snapshot_scene(state: &WorldState) -> SceneSpec {
    SceneSpec {
        scene_id: state.scene_id.to_string(),
        receptacles: state
            .receptacles
            .values()
            .map(|r| ReceptacleSpec {
                id: r.id.to_string(),
                kind: r.kind.name.to_string(),
                state_flags: r.state.to_list(),
            })
            .collect(),
        objects: state
            .objects
            .values()
            .map(|o| ObjectSpec {
                id: o.id.to_string(),
                kind: o.kind.name.to_string(),
                location: match &o.location {
                    Location::Receptacle(r) | Location::Inside(r) => r.to_string(),
                    Location::Held | Location::Floor => FLOOR.to_string(),
                },
                state_flags: o.state.to_list(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recep(id: &str, kind: &str) -> ReceptacleSpec {
        ReceptacleSpec {
            id: id.into(),
            kind: kind.into(),
            state_flags: vec![],
        }
    }

    fn obj(id: &str, kind: &str, loc: &str) -> ObjectSpec {
        ObjectSpec {
            id: id.into(),
            kind: kind.into(),
            location: loc.into(),
            state_flags: vec![],
        }
    }

    #[test]
    fn empty_scene_loads() {
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![],
            receptacles: vec![recep("CounterTop", "CounterTop")],
        };
        let w = load_scene(&spec).unwrap();
        assert_eq!(w.objects().count(), 0);
        assert_eq!(w.step_count(), 0);
    }

    #[test]
    fn tomato_on_counter() {
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![obj("tomato", "Tomato", "CounterTop")],
            receptacles: vec![recep("CounterTop", "CounterTop")],
        };
        let w = load_scene(&spec).unwrap();
        assert_eq!(
            w.object("tomato").unwrap().location,
            Location::Receptacle("CounterTop".into())
        );
    }

    #[test]
    fn dangling_location_names_target() {
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![obj("tomato", "Tomato", "Shelf9")],
            receptacles: vec![recep("CounterTop", "CounterTop")],
        };
        let err = load_scene(&spec).unwrap_err();
        assert!(err.to_string().contains("Shelf9"), "{err}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![obj("CounterTop", "Tomato", "CounterTop")],
            receptacles: vec![recep("CounterTop", "CounterTop")],
        };
        assert_eq!(
            load_scene(&spec).unwrap_err(),
            WorldError::DuplicateId("CounterTop".into())
        );
    }

    #[test]
    fn thermal_conflict_rejected() {
        let mut o = obj("tomato", "Tomato", "CounterTop");
        o.state_flags = vec![StateFlag::Heated, StateFlag::Cooled];
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![o],
            receptacles: vec![recep("CounterTop", "CounterTop")],
        };
        assert!(matches!(
            load_scene(&spec),
            Err(WorldError::InvalidState { .. })
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"scene_id":"s","objects":[],"receptacles":[],"extra":1}"#;
        assert!(SceneSpec::from_json(text).is_err());
    }

    #[test]
    fn canonical_json_round_trips_bytes() {
        let mut o = obj("tomato", "Tomato", "Fridge");
        o.state_flags = vec![StateFlag::Cooled];
        let mut f = recep("Fridge", "Fridge");
        f.state_flags = vec![StateFlag::Open];
        let spec = SceneSpec {
            scene_id: "s".into(),
            objects: vec![o],
            receptacles: vec![f],
        };
        let bytes = spec.to_json();
        let back = SceneSpec::from_json(&bytes).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.to_json(), bytes);
    }
}
