//! Chat-completion providers, constrained choice and usage accounting.
//!
//! [`Provider`] is the only interface planners see. [`RemoteProvider`]
//! speaks the OpenAI-compatible wire format, [`ReplayProvider`] returns
//! canned replies and [`ScriptedProvider`] is a rule-based stand-in whose
//! replies are pure functions of the request.

mod choose;
mod remote;
mod replay;
pub mod scripted;
mod tokens;
mod types;

pub use choose::{choose, label_index, option_label, parse_choice, render_options, Choice, CORRECTION, DEFAULT_CHOICE_RETRIES};
pub use remote::{parse_response, RateLimiter, RemoteConfig, RemoteProvider};
pub use replay::ReplayProvider;
pub use scripted::{ScriptedMode, ScriptedProvider};
pub use tokens::estimate_tokens;
pub use types::*;
