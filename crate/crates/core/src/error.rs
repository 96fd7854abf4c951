//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by loaders, stores, and metric computations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed content at a specific line of a textual input.
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    /// Structural problem with a file as a whole (bad binary layout, empty file, ...).
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    /// Same identifier defined twice in one input. `line` is the line number for
    /// textual formats and the record number for binary ones.
    #[error("{path}:{line}: duplicate identifier `{id}`")]
    Duplicate { path: PathBuf, line: usize, id: String },

    /// Binary file ended in the middle of a record.
    #[error("{path}: truncated record while reading vector for `{token}`")]
    Truncated { path: PathBuf, token: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    /// A vector with zero norm was fed into a similarity computation. The string
    /// names the offending identifier when the caller knows it.
    #[error("zero-norm vector{}", fmt_id(.0))]
    ZeroNorm(String),

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("subclass hierarchy contains a cycle through `{0}` and `{1}`")]
    CyclicHierarchy(String, String),

    #[error("concepts `{0}` and `{1}` are not connected in the hierarchy")]
    Disconnected(String, String),

    #[error("concepts `{0}` and `{1}` have no common ancestor")]
    NoCommonAncestor(String, String),

    #[error("property `{0}` has no domain/range entry in the schema")]
    MissingSchema(String),

    #[error("no entities of concept `{0}` have an embedding")]
    NoResolvableEntities(String),

    #[error("correlation is undefined for constant input")]
    ConstantInput,

    #[error("need at least {needed} {what}, got {got}")]
    Insufficient {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("not enough negative candidates for property `{property}`: need {needed}, have {available}")]
    NotEnoughNegatives {
        property: String,
        needed: usize,
        available: usize,
    },
}

fn fmt_id(id: &str) -> String {
    if id.is_empty() {
        String::new()
    } else {
        format!(" for `{id}`")
    }
}

impl Error {
    /// Attach an identifier to errors that can carry one.
    pub fn named(self, id: &str) -> Self {
        match self {
            Error::ZeroNorm(old) if old.is_empty() => Error::ZeroNorm(id.to_string()),
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format { path: path.into(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
