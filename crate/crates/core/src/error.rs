use std::path::PathBuf;

use thiserror::Error;

use crate::annotations::ValidationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {source}")]
    Json {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("expected schema `{expected}`, found `{found}`")]
    Schema { expected: String, found: String },

    #[error("invalid qualified name: {0}")]
    InvalidName(String),

    #[error("invalid API model: {0}")]
    InvalidModel(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("library mismatch: expected `{expected}`, found `{found}`")]
    LibraryMismatch { expected: String, found: String },

    #[error("version mismatch: expected `{expected}`, found `{found}`")]
    VersionMismatch { expected: String, found: String },

    #[error("annotation set has {} error(s)", .0.errors.len())]
    Validation(ValidationResult),

    #[error("wrapper generation failed: {0}")]
    Generation(String),

    #[error("invalid corpus: {0}")]
    Corpus(String),

    #[error("invalid glob pattern: {0}")]
    Glob(#[from] globset::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
