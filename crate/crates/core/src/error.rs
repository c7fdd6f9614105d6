use thiserror::Error;

/// Errors raised by the simulation and statistics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid observable: Bloch vector norm {norm} is not 1")]
    InvalidObservable { norm: f64 },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("tensor product dimension {0} exceeds 16")]
    DimensionOverflow(usize),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("process matrix is not completely positive (min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),

    #[error("fidelity against a non-rank-1 target is not supported (second eigenvalue {0:e})")]
    GeneralizedFidelityNotSupported(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined estimate: setting ({k},{l}) has zero total counts")]
    UndefinedEstimate { k: u8, l: u8 },
}

pub type Result<T> = std::result::Result<T, Error>;
