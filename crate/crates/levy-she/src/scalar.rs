//! Generic scalar abstraction for the analytic core.
//!
//! The closed-form kernel integrals, special functions and quadrature
//! routines are written against [`Real`] so they can be instantiated at
//! `f32` or `f64`. The stochastic machinery (simulator, estimators) is
//! fixed at `f64`.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar for the analytic core.
pub trait Real: Float + FloatConst + FromPrimitive + std::fmt::Debug + 'static {
    /// Lossy conversion from `f64`, used for baked-in constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable")
    }

    /// Lossy conversion to `f64` for caching and reporting.
    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
