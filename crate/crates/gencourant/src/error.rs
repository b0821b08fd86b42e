use gencourant_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed JSON or an expression that does not parse.
    #[error("parse error in {location}{}: {message}", offset.map(|o| format!(" at offset {o}")).unwrap_or_default())]
    Parse {
        location: String,
        offset: Option<usize>,
        message: String,
    },
    #[error("invalid scene: {0}")]
    Validation(String),
    /// The command does not apply to this scene.
    #[error("cannot run `{command}`: {reason}")]
    Command { command: String, reason: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Command { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    /// Wraps a library error raised while reading the expression at `location`.
    pub fn from_core(location: &str, e: CoreError) -> CliError {
        match e {
            CoreError::Syntax { offset, message } => CliError::Parse {
                location: location.to_string(),
                offset: Some(offset),
                message,
            },
            CoreError::UnknownSymbol(s) => CliError::Parse {
                location: location.to_string(),
                offset: None,
                message: format!("unknown symbol `{s}`"),
            },
            other => CliError::Validation(format!("{location}: {other}")),
        }
    }
}
