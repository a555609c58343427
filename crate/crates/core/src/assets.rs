//! Text assets compiled into the binary: scenes, prompt templates, lexicons
//! and the planning domain.

use crate::world::SceneSpec;

pub const SCENES: &[(&str, &str)] = &[
    ("bedroom_1", include_str!("../assets/scenes/bedroom_1.json")),
    ("kitchen_1", include_str!("../assets/scenes/kitchen_1.json")),
    ("kitchen_2", include_str!("../assets/scenes/kitchen_2.json")),
    ("livingroom_1", include_str!("../assets/scenes/livingroom_1.json")),
    ("tiny_3", include_str!("../assets/scenes/tiny_3.json")),
];

pub fn scene_text(id: &str) -> Option<&'static str> {
    SCENES.iter().find(|(name, _)| *name == id).map(|(_, t)| *t)
}

/// Parses a bundled scene. Bundled scenes are validated by tests, so a parse
/// failure here is a build defect.
pub fn scene(id: &str) -> Option<SceneSpec> {
    scene_text(id).map(|t| SceneSpec::from_json(t).expect("bundled scene is valid"))
}

pub fn all_scenes() -> Vec<SceneSpec> {
    SCENES
        .iter()
        .map(|(_, t)| SceneSpec::from_json(t).expect("bundled scene is valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::load_scene;

    #[test]
    fn bundled_scenes_load_and_are_canonical() {
        for (name, text) in SCENES {
            let spec = SceneSpec::from_json(text).unwrap();
            assert_eq!(&spec.scene_id, name);
            load_scene(&spec).unwrap();
            assert_eq!(spec.to_json(), *text, "{name} is not in canonical form");
        }
    }
}
