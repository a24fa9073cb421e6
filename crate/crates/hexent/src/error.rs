use std::path::{Path, PathBuf};

use hexent_core::topology::Edge;

/// Errors of the std layer. [`Error::exit_code`] maps them to the command
/// line contract: 1 for invalid input, 2 for failures while running.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
    #[error("edge {edge}: {message}")]
    Edge { edge: Edge, message: String },
    #[error("{context}: {message}")]
    Runtime { context: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse { context: context.into(), message: message.to_string() }
    }

    pub fn invalid(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Invalid { context: context.into(), message: message.to_string() }
    }

    pub fn edge(edge: Edge, message: impl ToString) -> Self {
        Error::Edge { edge, message: message.to_string() }
    }

    pub fn runtime(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Runtime { context: context.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Parse { .. } | Error::Invalid { .. } => 1,
            Error::Io { .. } | Error::Edge { .. } | Error::Runtime { .. } => 2,
        }
    }
}
