use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("group {group_id}: index {index} out of range (group has {len} entries)")]
    IndexOutOfRange { group_id: String, index: usize, len: usize },

    /// Transport failure or timeout talking to a model backend.
    #[error("backend error at {endpoint} (prompt {prompt_hash}): {message}")]
    Backend {
        endpoint: String,
        prompt_hash: String,
        message: String,
    },

    /// The remote side answered, but not in the shape we expect.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("retrieval error: {0}")]
    Retrieval(String),

    #[error("enrichment of label {label:?} failed: {source}")]
    Enrichment {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("context score for ({label_group}, {glossary_group}) failed: {source}")]
    Context {
        label_group: String,
        glossary_group: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error{}: {message}", location_suffix(.line, .column))]
    Parse {
        message: String,
        line: Option<usize>,
        column: Option<usize>,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn location_suffix(line: &Option<usize>, column: &Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" at line {l}, column {c}"),
        (Some(l), None) => format!(" at line {l}"),
        _ => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            message: message.into(),
            line: None,
            column: None,
        }
    }

    pub(crate) fn from_json(err: &serde_json::Error) -> Self {
        Error::Parse {
            message: err.to_string(),
            line: Some(err.line()),
            column: Some(err.column()),
        }
    }

    /// True for errors caused by missing or unreachable external knowledge.
    pub fn is_retrieval(&self) -> bool {
        match self {
            Error::Retrieval(_) => true,
            Error::Enrichment { source, .. } => source.is_retrieval(),
            _ => false,
        }
    }
}
