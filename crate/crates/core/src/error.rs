use thiserror::Error;

/// Errors raised by the geometry, operator, spectrum, dynamics and cosmology
/// routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamoError {
    #[error("metric is not positive-definite: {0}")]
    DegenerateMetric(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("grid size mismatch: expected {expected}, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("division by zero: {0} must be nonzero")]
    DivisionByZero(&'static str),

    #[error("no convergence after {iterations} iterations (last change {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("extrapolation did not converge: successive extrapolants {first} and {second}")]
    NonConvergent { first: f64, second: f64 },

    #[error("step unstable at t = {t}: norm grew by a factor {factor:e}")]
    StepUnstable { t: f64, factor: f64 },

    #[error("negative matter density rho = {0}")]
    NegativeDensity(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = DynamoError> = std::result::Result<T, E>;
