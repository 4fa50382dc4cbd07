use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize, context: &'static str },

    #[error("lift size mismatch: {left} vs {right}")]
    LiftSize { left: usize, right: usize },

    #[error("check matrices do not commute: Hx·Hzᵀ ≠ 0")]
    NotACssCode,

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("no root in (0, 1): {0}")]
    NoSolution(String),

    #[error("syndrome is not in the column space of the check matrix")]
    UnsatisfiableSyndrome,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
