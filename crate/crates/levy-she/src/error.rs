//! Error types shared across the crate.

use thiserror::Error;

/// Errors from the kernel-integral module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    /// Input outside the validity region of a closed form.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested integral diverges (p at or above 1 + 2/d).
    #[error("divergent integral: {0}")]
    Divergent(String),
}

/// Errors from the noise module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NoiseError {
    #[error("invalid noise specification: {0}")]
    Invalid(String),
    /// A jump-size moment integral is infinite.
    #[error("moment of order {order} is undefined for this Lévy measure")]
    MomentUndefined { order: f64 },
    /// The truncated measure carries no jump mass.
    #[error("degenerate Lévy measure: no jump mass above delta = {delta}")]
    Degenerate { delta: f64 },
}

/// Errors from the analytic-bounds module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum BoundsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    /// Curve fit on a grid too coarse or too short to be meaningful.
    #[error("fit quality warning: {0}")]
    FitQuality(String),
}

/// Errors from the simulator.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Non-finite field value encountered.
    #[error("simulation fault: non-finite field value at t = {time}")]
    FieldFault { time: f64 },
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Errors from the estimator module.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimatorError {
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Errors from the inequality lab.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum IneqError {
    #[error("invalid case: {0}")]
    Invalid(String),
}
