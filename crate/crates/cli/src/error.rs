use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("config key `{key}`: {reason}")]
    ConfigValidation { key: String, reason: String },

    #[error("unknown figure {0} (expected 1..9)")]
    UnknownFigure(u32),

    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: qbattery::Error,
    },

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(key: &str, reason: impl Into<String>) -> Self {
        CliError::ConfigValidation {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub fn numerical(context: impl Into<String>, source: qbattery::Error) -> Self {
        CliError::Numerical {
            context: context.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigSyntax { .. } | CliError::ConfigValidation { .. } | CliError::UnknownFigure(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}
