use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad report name `{name}`: {reason}")]
    Naming { name: String, reason: String },
    #[error("{}: invalid UTF-8 at byte {offset}", path.display())]
    Encoding { path: PathBuf, offset: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum LexiconError {
    /// Every offending row is listed, one diagnostic per line.
    #[error("lexicon validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("{origin}: {message}")]
    Format { origin: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store error: {0}")]
    Backend(#[from] rusqlite::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("csv header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("csv row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("events from several reports passed to a single-report match: {0:?}")]
    MixedReports(Vec<String>),
    #[error("inconsistent outcome counts: {0}")]
    Counts(String),
}

/// Umbrella error for callers that drive the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
