use std::collections::VecDeque;
use std::sync::Mutex;

use super::tokens::estimate_tokens;
use super::types::{ChatMessage, CompletionResult, GatewayError, Limits, Provider};

/// Returns canned replies in order; errors once the queue is empty.
pub struct ReplayProvider {
    replies: Mutex<VecDeque<Result<String, GatewayError>>>,
}

impl ReplayProvider {
    pub fn new<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        Self::with_results(replies.into_iter().map(|r| Ok(r.into())))
    }

    pub fn with_results(replies: impl IntoIterator<Item = Result<String, GatewayError>>) -> Self {
        ReplayProvider {
            replies: Mutex::new(replies.into_iter().collect()),
        }
    }

    pub fn remaining(&self) -> usize {
        self.replies.lock().unwrap().len()
    }
}

impl Provider for ReplayProvider {
    fn complete(&self, messages: &[ChatMessage], _: &Limits) -> Result<CompletionResult, GatewayError> {
        let next = self
            .replies
            .lock()
            .unwrap()
            .pop_front()
            .unwrap_or_else(|| Err(GatewayError::Malformed("replay queue exhausted".into())))?;
        let input: u64 = messages.iter().map(|m| estimate_tokens(&m.content)).sum();
        Ok(CompletionResult {
            input_tokens: input,
            output_tokens: estimate_tokens(&next),
            latency_ms: 0,
            estimated: true,
            text: next,
        })
    }

    fn describe(&self) -> String {
        "replay".into()
    }
}
