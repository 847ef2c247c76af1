use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("graph {graph}: {message}")]
    Structure { graph: String, message: String },

    #[error("cannot serialize graph {graph}: unreachable variables {}", .unreachable.join(", "))]
    Disconnected {
        graph: String,
        unreachable: Vec<String>,
    },

    #[error("annotation: {0}")]
    Ingestion(String),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("data file {path}: {message}")]
    Data { path: String, message: String },
}

impl Error {
    /// Short machine-readable category used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Structure { .. } => "structure",
            Error::Disconnected { .. } => "serialization",
            Error::Ingestion(_) => "ingestion",
            Error::Usage(_) => "usage",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
            Error::Data { .. } => "data",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
