//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max asymmetry {asym:.3e} exceeds {tol:.3e}")]
    NotHermitian { asym: f64, tol: f64 },

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid subsystem shape: {0}")]
    InvalidShape(String),

    #[error("no bipartition exists: need at least 2 parties, got {0}")]
    NoBipartition(usize),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("invalid map parameters: {0}")]
    InvalidMapParams(String),

    #[error("map incompatible with block: {0}")]
    MapIncompatible(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("solver failed: {status:?} after {iterations} iterations (gap {gap:.3e}, primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})")]
    SolverFailure {
        status: crate::sdp::SdpStatus,
        iterations: usize,
        gap: f64,
        primal_residual: f64,
        dual_residual: f64,
    },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
