use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad parameters, mismatched dimensions, impossible block sizes.
    #[error("configuration error: {0}")]
    Config(String),

    /// A population too small for the requested operation.
    #[error("degenerate population: {0}")]
    Degenerate(String),

    /// A caller broke an operation's precondition (e.g. ranking unevaluated members).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown objective `{name}` (registered: {})", registered.join(", "))]
    UnknownObjective {
        name: String,
        registered: Vec<&'static str>,
    },

    #[error("corrupt population file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("block index {index} out of range ({count} blocks)")]
    BlockOutOfRange { index: usize, count: usize },

    #[error("map task for block {block} failed: {source}")]
    MapTask {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("reduce phase failed: {0}")]
    Reduce(String),

    #[error("estimated footprint of {estimated_bytes} bytes exceeds the memory limit of {limit_bytes} bytes")]
    ResourceLimit { estimated_bytes: u64, limit_bytes: u64 },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
