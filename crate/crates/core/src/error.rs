use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precision error: {0}")]
    Precision(String),

    /// A computation would exceed one of the configured complexity guards.
    #[error("guard `{guard}` exceeded ({size} > {limit}): {hint}")]
    Guard {
        guard: &'static str,
        size: u128,
        limit: u128,
        hint: &'static str,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid {field}: {msg}")]
    Validation { field: &'static str, msg: String },

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn validation(field: &'static str, msg: impl Into<String>) -> Self {
        Error::Validation {
            field,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
