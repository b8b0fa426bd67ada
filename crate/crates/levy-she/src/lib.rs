//! Simulator and analytic-bounds toolkit for the stochastic heat equation
//! driven by Lévy space–time white noise.
//!
//! The analytic core (kernel integrals, special functions, quadrature) is
//! generic over the scalar type through [`scalar::Real`]; the stochastic
//! machinery works in `f64`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod grid;
pub mod ineq;
pub mod kernel;
pub mod noise;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod simulator;
pub mod special;

/// Single-precision kernel parameters.
pub type KernelParams32 = kernel::KernelParams<f32>;
/// Double-precision kernel parameters.
pub type KernelParams64 = kernel::KernelParams<f64>;
