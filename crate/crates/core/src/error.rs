use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value: {0}")]
    Validation(String),

    #[error("no recommendations issued")]
    NoRecommendations,

    #[error("singular fit: need at least 3 distinct x values, got {distinct}")]
    SingularFit { distinct: usize },

    #[error("xml parse error in {path} at line {line}: {message}")]
    XmlParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
