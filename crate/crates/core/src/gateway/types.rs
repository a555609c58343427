use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

/// Sampling limits sent with each request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub max_tokens: u32,
    pub temperature: f32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_tokens: 256,
            temperature: 0.0,
        }
    }
}

impl Limits {
    /// Room for a full dialogue; used by dataset generation prompts.
    pub fn generation() -> Self {
        Limits {
            max_tokens: 2048,
            ..Limits::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
    /// Token counts came from [`estimate_tokens`](super::estimate_tokens),
    /// not from the provider.
    pub estimated: bool,
}

impl CompletionResult {
    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

/// Running totals over gateway calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub calls: u64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
    pub estimated: bool,
}

impl Usage {
    pub fn record(&mut self, r: &CompletionResult) {
        self.calls += 1;
        self.input_tokens += r.input_tokens;
        self.output_tokens += r.output_tokens;
        self.latency_ms += r.latency_ms;
        self.estimated |= r.estimated;
    }

    pub fn add(&mut self, other: &Usage) {
        self.calls += other.calls;
        self.input_tokens += other.input_tokens;
        self.output_tokens += other.output_tokens;
        self.latency_ms += other.latency_ms;
        self.estimated |= other.estimated;
    }

    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("request timed out after {0} ms")]
    Timeout(u64),
    #[error("rate limited (HTTP {status}) after {attempts} attempt(s)")]
    RateLimited { status: u16, attempts: u32 },
    #[error("provider returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed provider response: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider misconfigured: {0}")]
    Config(String),
}

/// A chat-completion backend. Implementations must tolerate concurrent calls.
pub trait Provider: Send + Sync {
    fn complete(&self, messages: &[ChatMessage], limits: &Limits) -> Result<CompletionResult, GatewayError>;

    /// Short description recorded in run manifests.
    fn describe(&self) -> String;
}

impl<P: Provider + ?Sized> Provider for std::sync::Arc<P> {
    fn complete(&self, messages: &[ChatMessage], limits: &Limits) -> Result<CompletionResult, GatewayError> {
        (**self).complete(messages, limits)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<P: Provider + ?Sized> Provider for Box<P> {
    fn complete(&self, messages: &[ChatMessage], limits: &Limits) -> Result<CompletionResult, GatewayError> {
        (**self).complete(messages, limits)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}
