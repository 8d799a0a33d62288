use std::path::PathBuf;

use thiserror::Error;

use crate::reward::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reward function violates the improving class: {0}")]
    InvalidRewardFunction(ValidationReport),

    #[error("invalid instance `{id}`: {reason}")]
    InvalidInstance { id: String, reason: String },

    #[error("enumeration of {compositions} allocations exceeds the limit of {limit}")]
    EnumerationTooLarge { compositions: u128, limit: u128 },

    #[error("trace does not match instance `{instance_id}`: {reason}")]
    TraceMismatch { instance_id: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
