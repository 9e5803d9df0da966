use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("write to `{path}` failed after {docs_written} documents: {source}")]
    Write {
        path: PathBuf,
        docs_written: u64,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid misspelling map: {0}")]
    MisspellingMap(String),
    #[error("corpus split: {0}")]
    Split(String),
    #[error("language detection: {0}")]
    Language(String),
    #[error("token stream: {0}")]
    Spans(String),
    #[error("metrics: {0}")]
    Metrics(String),
    #[error("evaluation ids do not match: {0}")]
    UnmatchedIds(String),
}

impl Error {
    /// True for failures caused by user-supplied input or configuration.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Write { .. })
    }
}
