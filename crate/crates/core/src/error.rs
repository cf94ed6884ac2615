use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A required logical column is not present in the header.
    #[error("schema error: missing column `{column}`")]
    MissingColumn { column: String },

    #[error("schema error: {0}")]
    Schema(String),

    /// A data row could not be parsed. `line` is 1-based and counts the header.
    #[error("row error at line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("dataset error: duplicate txn_id `{0}`")]
    DuplicateTxnId(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// Malformed persisted artifact (census dump, report, code).
    #[error("format error: {0}")]
    Format(String),

    #[error("file error: {path}: {source}")]
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

impl Error {
    /// Stable machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingColumn { .. } | Error::Schema(_) => "schema",
            Error::Row { .. } => "row",
            Error::DuplicateTxnId(_) => "dataset",
            Error::Structural(_) => "structural",
            Error::Contract(_) => "contract",
            Error::Config(_) => "config",
            Error::Usage(_) => "usage",
            Error::Format(_) => "format",
            Error::File { .. } | Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
