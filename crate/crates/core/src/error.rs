use std::path::PathBuf;

/// Errors raised anywhere in the library.
///
/// Each variant maps onto one of the CLI exit codes through [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid value for config key `{key}`: {reason}")]
    ConfigKey { key: String, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("missing data file {path}; run `hyperpinn generate --config {config}` first")]
    MissingData { path: PathBuf, config: String },

    #[error("load error: {0}")]
    Load(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("training aborted at iteration {iteration}: {reason} (loss {loss})")]
    Training {
        iteration: usize,
        loss: f64,
        reason: String,
    },

    #[error("solver error: {reason} (achieved tolerance {achieved:.3e})")]
    Solver { reason: String, achieved: f64 },

    #[error("integrator error: {0}")]
    Integrator(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn key(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigKey {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn load(msg: impl Into<String>) -> Self {
        Error::Load(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 config, 3 data, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ConfigKey { .. } | Error::Internal(_) => 2,
            Error::Data(_) | Error::MissingData { .. } | Error::Load(_) | Error::Io { .. } => 3,
            Error::Domain(_)
            | Error::Training { .. }
            | Error::Solver { .. }
            | Error::Integrator(_) => 4,
        }
    }
}
