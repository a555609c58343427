//! Episode files: JSON Lines, one episode per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::types::{Episode, EPISODE_SCHEMA};
use super::DatasetError;

pub fn to_jsonl(episodes: &[Episode]) -> String {
    let mut out = String::new();
    for e in episodes {
        out.push_str(&serde_json::to_string(e).expect("episodes serialize"));
        out.push('\n');
    }
    out
}

/// Parses episodes; errors carry the 1-based line number.
pub fn from_jsonl(text: &str) -> Result<Vec<Episode>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ep: Episode = serde_json::from_str(line).map_err(|e| DatasetError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if ep.schema != EPISODE_SCHEMA {
            return Err(DatasetError::Parse {
                line: i + 1,
                msg: format!("unsupported schema {} (expected {EPISODE_SCHEMA})", ep.schema),
            });
        }
        out.push(ep);
    }
    Ok(out)
}

pub fn write_episodes(path: &Path, episodes: &[Episode]) -> Result<(), DatasetError> {
    let io = |e: std::io::Error| DatasetError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(to_jsonl(episodes).as_bytes()).map_err(io)
}

pub fn read_episodes(path: &Path) -> Result<Vec<Episode>, DatasetError> {
    let text = fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    from_jsonl(&text)
}
