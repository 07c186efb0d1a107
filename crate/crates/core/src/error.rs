use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("document has no PrintSpace element")]
    EmptyDocument,

    #[error("document contains no text lines")]
    NoLines,

    #[error("duplicate element id `{0}`")]
    DuplicateId(String),

    #[error("elements without a label: {}", .0.join(", "))]
    IncompleteAnnotation(Vec<String>),

    #[error("rule file line {line}, column {column}: {message}")]
    RuleSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown threshold `{0}`")]
    UnknownThreshold(String),

    #[error("unknown label `{label}`{}", .row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    UnknownLabel { label: String, row: Option<usize> },

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("prediction and truth ids differ: {}", .0.join(", "))]
    IdMismatch(Vec<String>),

    #[error("reports were computed over different ground truths")]
    TruthMismatch,

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
