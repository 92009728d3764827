use thiserror::Error;

/// Errors raised across the library. Each variant names the hypothesis or
/// contract that failed.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("function is not of bounded variation: {0}")]
    NotBv(String),
    #[error("tail classification failed: {0}")]
    Classification(String),
    #[error("integral does not converge: {0}")]
    Divergent(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("integrator is not absolutely continuous: {0}")]
    NotAc(String),
    #[error("B and C share a discontinuity at t = {0}")]
    CommonDiscontinuity(f64),
    #[error("cantor recursion depth {0} exceeds 60")]
    Depth(usize),
    #[error("tagged partition is not fine: {0}")]
    NotFine(String),
    #[error("function is not odd about {center}: {detail}")]
    NotOdd { center: f64, detail: String },
    #[error("weighted integrability fails near {0}")]
    WeightedIntegrability(f64),
    #[error("frequency s = 0 is not admissible here")]
    ZeroFrequency,
    #[error("singularity inside integration range at t = {0}")]
    Singularity(f64),
    #[error("inversion did not converge: {0}")]
    NonConvergence(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
