use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("target qubit {qubit} out of range for a {num_qubits}-qubit register")]
    TargetOutOfRange { qubit: usize, num_qubits: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("register layout does not match state: {0}")]
    LayoutMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigenvalue {0} not found in spectrum")]
    EigenvalueNotFound(f64),
    #[error("target eigenvalue is degenerate (multiplicity {0})")]
    DegenerateTarget(usize),
    #[error("operator norm {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("malformed instance: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
