//! Benchmark generator and evaluation harness for LLM-based robot task
//! planners facing vague referring expressions in multi-turn dialogue.
//!
//! The crate is organised bottom-up:
//!
//! * [`world`] is a deterministic symbolic household simulator.
//! * [`dataset`] builds dialogue episodes across the 3×3 vagueness grid.
//! * [`gateway`] abstracts chat-completion providers, including a scripted one.
//! * [`planners`] implements step-wise constrained skill selection and a
//!   translate-then-search planner over a small planning-domain language.
//! * [`strategies`] layers prompting strategies over the planners.
//! * [`eval`] runs episodes, classifies errors and renders reports.
//! * [`cli`] wires everything behind the `reibench` binary, and
//!   [`selfcheck`] holds the offline checks it can run.

pub mod assets;
pub mod world;
pub mod gateway;
pub mod dataset;
pub mod planners;
pub mod strategies;
pub mod eval;
pub mod selfcheck;
pub mod cli;
