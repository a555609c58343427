//! Deterministic rule-based provider used by tests and offline runs.
//!
//! Replies depend only on the request. Tokens are estimated; latency is a
//! synthetic figure derived from the seed and the request text.

mod mind;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tokens::estimate_tokens;
use super::types::{ChatMessage, CompletionResult, GatewayError, Limits, Provider, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptedMode {
    /// Resolves every referring expression from the dialogue.
    PerfectResolution,
    /// Resolves named objects; anything vaguer goes to the most recently
    /// mentioned object.
    ContextBlind,
    /// Resolves correctly, then acts on a different object.
    OmitObject,
    /// Replies with the last user message.
    Echo,
}

impl ScriptedMode {
    pub const ALL: [ScriptedMode; 4] = [
        ScriptedMode::PerfectResolution,
        ScriptedMode::ContextBlind,
        ScriptedMode::OmitObject,
        ScriptedMode::Echo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScriptedMode::PerfectResolution => "perfect",
            ScriptedMode::ContextBlind => "context-blind",
            ScriptedMode::OmitObject => "omit-object",
            ScriptedMode::Echo => "echo",
        }
    }
}

impl fmt::Display for ScriptedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScriptedMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        match norm.as_str() {
            "perfect" | "perfect-resolution" => Ok(ScriptedMode::PerfectResolution),
            "context-blind" | "blind" => Ok(ScriptedMode::ContextBlind),
            "omit-object" | "omit" => Ok(ScriptedMode::OmitObject),
            "echo" => Ok(ScriptedMode::Echo),
            _ => Err(format!(
                "unknown scripted mode `{s}` (expected perfect, context-blind, omit-object or echo)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedProvider {
    pub mode: ScriptedMode,
    pub seed: u64,
}

impl ScriptedProvider {
    pub fn new(mode: ScriptedMode, seed: u64) -> Self {
        ScriptedProvider { mode, seed }
    }

    fn latency(&self, messages: &[ChatMessage], input: u64, output: u64) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        for m in messages {
            h.update(m.role.to_string().as_bytes());
            h.update([0]);
            h.update(m.content.as_bytes());
            h.update([0]);
        }
        let d = h.finalize();
        let jitter = u64::from_le_bytes(d[..8].try_into().unwrap()) % 40;
        120 + input / 20 + output * 15 + jitter
    }
}

impl Provider for ScriptedProvider {
    fn complete(&self, messages: &[ChatMessage], _limits: &Limits) -> Result<CompletionResult, GatewayError> {
        let users: Vec<&str> = messages
            .iter()
            .filter(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .collect();
        let Some(last) = users.last() else {
            return Err(GatewayError::Malformed("request has no user message".to_string()));
        };
        let text = match self.mode {
            ScriptedMode::Echo => last.to_string(),
            mode => mind::respond(mode, &users.join("\n\n")),
        };
        let input: u64 = messages.iter().map(|m| estimate_tokens(&m.content)).sum();
        let output = estimate_tokens(&text);
        Ok(CompletionResult {
            latency_ms: self.latency(messages, input, output),
            text,
            input_tokens: input,
            output_tokens: output,
            estimated: true,
        })
    }

    fn describe(&self) -> String {
        format!("scripted/{} seed={}", self.mode, self.seed)
    }
}
