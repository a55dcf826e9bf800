use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent shapes, group sizes or index sets.
    #[error("argument error: {0}")]
    Argument(String),

    /// A file on disk does not match the expected layout.
    #[error("schema error in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },

    #[error("not found: {0}")]
    NotFound(PathBuf),

    /// A configuration document failed validation.
    #[error("config error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code, printed as the first token of CLI errors.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::Argument(_) => "E_ARGUMENT",
            Error::Schema { .. } => "E_SCHEMA",
            Error::NotFound(_) => "E_NOT_FOUND",
            Error::Config { .. } => "E_CONFIG",
            Error::Io { .. } => "E_IO",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
