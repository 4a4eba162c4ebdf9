//! Persistence and configuration: CSV datasets, traces, reports, parameter
//! files, and the flat key-value scenario config.
//!
//! Everything is written with Rust's shortest round-trip float formatting,
//! so reading a file back reproduces the original values exactly and two
//! runs with the same seeds produce byte-identical artifacts. Every artifact
//! embeds the scenario's config hash and seed in `#`-prefixed header lines.

mod config;
mod csv;
mod kv;
mod params;
mod time;

pub use config::{Building, MethodSel, ScenarioConfig};
pub use csv::{read_dataset, read_report, write_dataset, write_report, write_trace, ReportRow, TraceColumn};
pub use kv::parse_kv_lines;
pub use params::{read_params, write_params, StoredModel};
pub use time::{format_timestamp, parse_timestamp};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}: malformed header: {detail}")]
    MalformedHeader { path: String, detail: String },
    #[error("row {row}: missing cell in column {column}")]
    MissingCell { row: usize, column: String },
    #[error("row {row}, column {column}: {detail}")]
    BadValue {
        row: usize,
        column: String,
        detail: String,
    },
    #[error("row {row}: irregular timestamp spacing (expected {expected} s, got {got} s)")]
    IrregularSpacing { row: usize, expected: f64, got: f64 },
    #[error("line {line}: {detail}")]
    BadLine { line: usize, detail: String },
    #[error("missing required key {0}")]
    MissingKey(String),
    #[error("unknown configuration key {0}")]
    UnknownKey(String),
    #[error("configuration invalid: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
}
