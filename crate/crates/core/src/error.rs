use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("schema error: missing required column `{0}`")]
    Schema(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown property key `{0}`")]
    UnknownProperty(String),

    #[error("unknown class `{value}`; known classes: {known:?}")]
    UnknownClass { value: String, known: Vec<String> },

    #[error("rating for user `{event}` cannot be applied to profile of `{profile}`")]
    UserMismatch { profile: String, event: String },

    #[error("connector `{repository}` failed: {message}")]
    Connector { repository: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("state error: {0}")]
    State(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
