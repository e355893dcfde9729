use thiserror::Error;

/// Errors raised by operator construction and the inference routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("vector has norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("vector is zero or numerically cancels")]
    ZeroVector,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("Bloch vector has norm {0} > 1")]
    BlochOutOfBall(f64),

    #[error("elements do not sum to the identity (max deviation {0:e})")]
    Incomplete(f64),

    #[error("duplicate outcome label {0}")]
    DuplicateLabel(String),

    #[error("unknown outcome label {0}")]
    UnknownLabel(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operators do not commute (max commutator entry {0:e})")]
    NonCommuting(f64),

    #[error("outcome {label} has probability {probability:e}, posterior undefined")]
    ZeroProbability { label: String, probability: f64 },

    #[error("function undefined at eigenvalue {0}")]
    Domain(f64),

    #[error("quantum information is zero")]
    ZeroInformation,

    #[error("score equation residual {0:e} exceeds tolerance")]
    ScoreResidual(f64),

    #[error("derivative is not traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("likelihood is zero over the whole search range")]
    ZeroLikelihood,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
