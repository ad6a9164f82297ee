use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{n} qubits is too large for {what}")]
    TooLarge { what: &'static str, n: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("preservation violated: {0}")]
    Preservation(String),

    #[error("step {step}: {msg}")]
    Step { step: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
