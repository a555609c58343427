use std::process::Command;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA: u32 = 1;

/// Written beside reports; enough to reproduce a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub run_id: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub run_seed: u64,
    pub dataset_sha256: String,
    pub episodes: usize,
    pub provider: String,
    pub git_describe: String,
    pub tool_version: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the config's compact JSON encoding.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    sha256_hex(serde_json::to_string(config).expect("config serializes").as_bytes())
}

/// `git describe --always --dirty` of the working directory, or `unknown`.
pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".to_string())
}

impl RunManifest {
    pub fn new<T: Serialize>(
        run_id: &str,
        config: &T,
        run_seed: u64,
        dataset: &[u8],
        episodes: usize,
        provider: String,
    ) -> Self {
        RunManifest {
            schema: MANIFEST_SCHEMA,
            run_id: run_id.to_string(),
            config_hash: config_hash(config),
            config: serde_json::to_value(config).expect("config serializes"),
            run_seed,
            dataset_sha256: sha256_hex(dataset),
            episodes,
            provider,
            git_describe: git_describe(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(config_hash(&[1, 2]), config_hash(&[1, 2]));
        assert_ne!(config_hash(&[1, 2]), config_hash(&[2, 1]));
    }
}
