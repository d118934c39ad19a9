use thiserror::Error;

/// Errors produced by the integrators, problems and models in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite values detected at t = {t} (blow-up)")]
    BlowUp { t: f64 },

    #[error("multistep history holds {have} entries, {needed} required")]
    InsufficientHistory { needed: usize, have: usize },

    #[error("exponential Adams steps require equidistant history (spacing {spacing}, step {step})")]
    NonEquidistantHistory { spacing: f64, step: f64 },

    #[error("interpolation nodes must be distinct")]
    DuplicateNodes,

    #[error("tolerance unattainable: step size {h} below minimum {h_min} at t = {t}")]
    ToleranceUnattainable { t: f64, h: f64, h_min: f64 },

    #[error("method '{0}' provides no error estimate and cannot be used adaptively")]
    NoErrorEstimator(String),

    #[error("unknown method identifier '{0}'")]
    UnknownMethod(String),

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
