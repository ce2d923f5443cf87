use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LgError {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, LgError>;
