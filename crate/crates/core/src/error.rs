use thiserror::Error;

/// Errors produced by operator construction, signal generation, profile
/// handling, and the recovery solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operator is rank deficient: sigma_min = {sigma_min:.3e}, sigma_max = {sigma_max:.3e}")]
    RankDeficient { sigma_min: f64, sigma_max: f64 },
    #[error("cosparse constraint infeasible: null space of the off-support rows is trivial (p = {p}, s = {s}, n = {n})")]
    InfeasibleSparsity { p: usize, s: usize, n: usize },
    #[error("degenerate draw: analysis support smaller than requested after {retries} resampling attempts")]
    DegenerateDraw { retries: usize },
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("reference vector has zero norm")]
    ZeroReference,
    #[error("infeasible prior profile: {0}")]
    InfeasibleProfile(String),
    #[error("solver did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
