//! Dialogue episodes across the 3×3 vagueness grid.
//!
//! A seed instruction is expanded into six dialogue rounds plus a final
//! request ([`expand`]), noised with an ambiguous name ([`noise`]),
//! shortened ([`short`]) and then rewritten at three RE levels
//! ([`replace`]). Every stage runs on its own rng stream derived from the
//! run seed, the seed id and the replicate number.

pub mod annotate;
pub mod expand;
pub mod filter;
pub mod io;
pub mod lexicon;
pub mod noise;
pub mod pipeline;
pub mod replace;
pub mod sample;
pub mod seeds;
pub mod short;
mod templates;
pub mod text;
mod types;

use thiserror::Error;

use crate::gateway::GatewayError;
use crate::world::TaskKind;

pub use annotate::{annotate, identify_res, Referent};
pub use expand::{expand_context, Generator};
pub use filter::{count_res, filter_episode, Bound, FilterRules, RowRule};
pub use io::{from_jsonl, read_episodes, to_jsonl, write_episodes};
pub use noise::{make_ambiguous_name, make_noised};
pub use pipeline::{generate, generate_unit, regenerate, GenConfig};
pub use replace::replace_res;
pub use sample::{apportion, stratified_sample, table3, Proportions};
pub use seeds::{bundled_seeds, SeedInstruction};
pub use short::make_short;
pub use types::*;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("empty instruction")]
    EmptyInstruction,
    #[error("no object mention found in `{0}`")]
    NoMentions(String),
    #[error("generator output rejected: {0}")]
    Structure(String),
    #[error("context has no removable noun phrase")]
    NoRemovable,
    #[error("no descriptor lexicon entry for {0}")]
    NoLexiconEntry(String),
    #[error("pool has {available} {kind} task(s), quota needs {needed}")]
    InsufficientPool { kind: TaskKind, needed: u64, available: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("unknown scene `{0}`")]
    UnknownScene(String),
    #[error("seed `{0}` has no plan within the search budget")]
    Unsolvable(String),
    #[error("episode {id} fails the counting filter with {quad:?}")]
    Filtered { id: String, quad: RECountQuad },
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}
