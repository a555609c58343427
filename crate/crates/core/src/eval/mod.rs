//! Episode runner, error classification, aggregation and reports.

mod aggregate;
mod manifest;
mod record;
mod report;
mod run;

use std::path::Path;

use thiserror::Error;

pub use aggregate::{aggregate, fmt_delta, fmt_pct, fmt_scaled, Aggregate, CellCounts, UsageSummary};
pub use manifest::{config_hash, git_describe, sha256_hex, RunManifest, MANIFEST_SCHEMA};
pub use record::{classify_error, ErrorClass, EvalRecord, RewriteAudit, RECORD_SCHEMA};
pub use report::{emit_report, ReportFormat, CLASSIFICATION_RULE, EMPTY_CELL, REPORT_SCHEMA, TOKEN_COLUMNS};
pub use run::{run_all, run_episode, EvalConfig};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no records to aggregate")]
    NoRecords,
    #[error("records from different runs (`{0}` and `{1}`) cannot be aggregated together")]
    MixedRuns(String, String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn records_to_jsonl(records: &[EvalRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serializes"));
        s.push('\n');
    }
    s
}

pub fn records_from_jsonl(text: &str) -> Result<Vec<EvalRecord>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: EvalRecord = serde_json::from_str(line).map_err(|e| EvalError::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if r.schema != RECORD_SCHEMA {
            return Err(EvalError::Parse {
                line: i + 1,
                msg: format!("record schema {} is not supported (expected {RECORD_SCHEMA})", r.schema),
            });
        }
        out.push(r);
    }
    Ok(out)
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    records_from_jsonl(&text)
}
