use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid qubit selection: {0}")]
    InvalidQubits(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("eigen solver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid switch spec: {0}")]
    InvalidSpec(String),

    #[error("orthogonality condition violated at qubit {qubit} (|overlap| = {magnitude:e})")]
    ConditionViolated { qubit: usize, magnitude: f64 },

    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid value at {pointer}: {reason}")]
    Field { pointer: String, reason: String },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// I/O failures map to exit status 2, everything else to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
