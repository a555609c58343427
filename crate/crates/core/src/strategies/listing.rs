//! Plain-text scene listing embedded in planning prompts.

use std::sync::OnceLock;

use regex::Regex;

use crate::world::{ObjectSpec, ReceptacleSpec, SceneSpec, StateFlag};

fn flags_suffix(flags: &[StateFlag]) -> String {
    flags.iter().map(|f| format!(", {}", f.as_str())).collect()
}

/// One line per object, then one per receptacle.
pub fn render_scene(scene: &SceneSpec) -> String {
    let mut lines = Vec::new();
    for o in &scene.objects {
        lines.push(format!("- {}: {}, at {}{}", o.id, o.kind, o.location, flags_suffix(&o.state_flags)));
    }
    for r in &scene.receptacles {
        lines.push(format!("- {}: {} (receptacle){}", r.id, r.kind, flags_suffix(&r.state_flags)));
    }
    lines.join("\n")
}

fn line_re() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    R.get_or_init(|| Regex::new(r"^- (\w+): (\w+)( \(receptacle\))?(?:, at (\w+))?((?:, \w+)*)$").unwrap())
}

fn parse_flag(s: &str) -> Option<StateFlag> {
    StateFlag::ALL.into_iter().find(|f| f.as_str() == s)
}

/// Inverse of [`render_scene`]. Lines that do not look like listing entries
/// are skipped; a malformed entry makes the whole listing unreadable.
pub fn parse_scene_listing(text: &str) -> Option<SceneSpec> {
    let mut scene = SceneSpec {
        scene_id: "prompt".to_string(),
        objects: Vec::new(),
        receptacles: Vec::new(),
    };
    for line in text.lines().map(str::trim).filter(|l| l.starts_with("- ")) {
        let c = line_re().captures(line)?;
        let flags = c[5]
            .split(", ")
            .filter(|s| !s.is_empty())
            .map(parse_flag)
            .collect::<Option<Vec<_>>>()?;
        match (c.get(3), c.get(4)) {
            (Some(_), None) => scene.receptacles.push(ReceptacleSpec {
                id: c[1].to_string(),
                kind: c[2].to_string(),
                state_flags: flags,
            }),
            (None, Some(loc)) => scene.objects.push(ObjectSpec {
                id: c[1].to_string(),
                kind: c[2].to_string(),
                location: loc.as_str().to_string(),
                state_flags: flags,
            }),
            _ => return None,
        }
    }
    Some(scene)
}
