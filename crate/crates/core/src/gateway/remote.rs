//! OpenAI-compatible chat-completions client.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::tokens::estimate_tokens;
use super::types::{ChatMessage, CompletionResult, GatewayError, Limits, Provider};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteConfig {
    /// Base URL; `/chat/completions` is appended.
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_base_ms: u64,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    /// Sustained request rate shared by all threads; 0 disables limiting.
    #[serde(default)]
    pub requests_per_second: f64,
    /// Never read from config files; filled from `REI_API_KEY`.
    #[serde(skip)]
    pub api_key: Option<String>,
}

fn default_retries() -> u32 {
    3
}
fn default_backoff() -> u64 {
    500
}
fn default_timeout() -> u64 {
    60_000
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            max_retries: default_retries(),
            backoff_base_ms: default_backoff(),
            timeout_ms: default_timeout(),
            requests_per_second: 0.0,
            api_key: None,
        }
    }
}

/// Token bucket holding at most one second of requests.
pub struct RateLimiter {
    rate: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(rate: f64) -> Self {
        RateLimiter {
            rate,
            state: Mutex::new((rate.max(1.0), Instant::now())),
        }
    }

    /// Blocks until a request may be sent.
    pub fn acquire(&self) {
        if self.rate <= 0.0 {
            return;
        }
        loop {
            let wait = {
                let mut s = self.state.lock().unwrap();
                let now = Instant::now();
                let refill = now.duration_since(s.1).as_secs_f64() * self.rate;
                s.0 = (s.0 + refill).min(self.rate.max(1.0));
                s.1 = now;
                if s.0 >= 1.0 {
                    s.0 -= 1.0;
                    return;
                }
                (1.0 - s.0) / self.rate
            };
            std::thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

pub struct RemoteProvider {
    config: RemoteConfig,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

enum Attempt {
    Done(CompletionResult),
    Retry(GatewayError),
    Fail(GatewayError),
}

impl RemoteProvider {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build();
        let limiter = RateLimiter::new(config.requests_per_second);
        RemoteProvider {
            config,
            agent,
            limiter,
        }
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }

    fn attempt(&self, body: &Value, messages: &[ChatMessage]) -> Attempt {
        self.limiter.acquire();
        let start = Instant::now();
        let mut req = self.agent.post(&self.url()).set("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = match req.send_json(body.clone()) {
            Ok(r) => r,
            Err(ureq::Error::Status(status, r)) => {
                let body = r.into_string().unwrap_or_default();
                return if status == 429 {
                    Attempt::Retry(GatewayError::RateLimited { status, attempts: 0 })
                } else if status >= 500 {
                    Attempt::Retry(GatewayError::Status { status, body })
                } else {
                    Attempt::Fail(GatewayError::Status { status, body })
                };
            }
            Err(ureq::Error::Transport(t)) => {
                let msg = t.to_string();
                return if msg.contains("timed out") || msg.contains("timeout") {
                    Attempt::Retry(GatewayError::Timeout(self.config.timeout_ms))
                } else {
                    Attempt::Retry(GatewayError::Transport(msg))
                };
            }
        };
        let value: Value = match resp.into_json() {
            Ok(v) => v,
            Err(e) => return Attempt::Fail(GatewayError::Malformed(e.to_string())),
        };
        let latency_ms = start.elapsed().as_millis() as u64;
        match parse_response(&value, messages, latency_ms) {
            Ok(r) => Attempt::Done(r),
            Err(e) => Attempt::Fail(e),
        }
    }
}

/// Extracts text and usage from a chat-completions response body.
pub fn parse_response(v: &Value, messages: &[ChatMessage], latency_ms: u64) -> Result<CompletionResult, GatewayError> {
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| GatewayError::Malformed("missing choices[0].message.content".into()))?
        .to_string();
    let usage = (
        v.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
        v.pointer("/usage/completion_tokens").and_then(Value::as_u64),
    );
    Ok(match usage {
        (Some(input_tokens), Some(output_tokens)) => CompletionResult {
            text,
            input_tokens,
            output_tokens,
            latency_ms,
            estimated: false,
        },
        _ => CompletionResult {
            input_tokens: messages.iter().map(|m| estimate_tokens(&m.content)).sum(),
            output_tokens: estimate_tokens(&text),
            text,
            latency_ms,
            estimated: true,
        },
    })
}

impl Provider for RemoteProvider {
    fn complete(&self, messages: &[ChatMessage], limits: &Limits) -> Result<CompletionResult, GatewayError> {
        let body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": limits.temperature,
            "max_tokens": limits.max_tokens,
        });
        let mut last = GatewayError::Config("no attempt made".into());
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                let delay = self.config.backoff_base_ms.saturating_mul(1 << (attempt - 1).min(16));
                std::thread::sleep(Duration::from_millis(delay));
            }
            match self.attempt(&body, messages) {
                Attempt::Done(r) => return Ok(r),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) => last = e,
            }
        }
        Err(match last {
            GatewayError::RateLimited { status, .. } => GatewayError::RateLimited {
                status,
                attempts: self.config.max_retries + 1,
            },
            other => other,
        })
    }

    fn describe(&self) -> String {
        format!("remote:{}@{}", self.config.model, self.config.endpoint)
    }
}
