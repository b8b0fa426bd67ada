//! Analytic constants, exponent brackets and renewal-theoretic machinery.
//!
//! Upper bounds come from the weighted-kernel contraction constant
//! C_{β,c}(κ,p) and its threshold β₀; lower bounds come from a renewal
//! kernel built on heat-kernel level sets, whose Malthusian root β₁
//! certifies exponential moment growth.

use serde::{Deserialize, Serialize};

use crate::error::BoundsError;
use crate::fit;
use crate::kernel::{self, KernelParams};
use crate::noise::LevyNoiseSpec;
use crate::quad::{self, QuadTol};
use crate::special;

/// Treatment of the universal constants the underlying inequalities only
/// assert to exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantsMode {
    /// All unspecified universal constants set to 1; use for rate and
    /// scaling studies where constants cancel in log-asymptotics.
    Normalized,
    /// Explicit values where known: the split-moment constant is 1/4 on
    /// (1,2] and 1/6 on (2,3]; the martingale and Poisson-inequality
    /// constants stay configurable.
    Conservative { bdg_cp: f64, poi_cp: f64 },
}

impl ConstantsMode {
    pub fn conservative() -> Self {
        ConstantsMode::Conservative { bdg_cp: 1.0, poi_cp: 1.0 }
    }

    /// Martingale-inequality constant.
    pub fn bdg_cp(&self) -> f64 {
        match *self {
            ConstantsMode::Normalized => 1.0,
            ConstantsMode::Conservative { bdg_cp, .. } => bdg_cp,
        }
    }

    /// Split-moment constant: 1/4 on (1,2], 1/6 on (2,3].
    pub fn split_cp(&self, p: f64) -> f64 {
        match *self {
            ConstantsMode::Normalized => 1.0,
            ConstantsMode::Conservative { .. } => {
                if p <= 2.0 {
                    0.25
                } else {
                    1.0 / 6.0
                }
            }
        }
    }

    /// Poisson-integral inequality constant.
    pub fn poi_cp(&self) -> f64 {
        match *self {
            ConstantsMode::Normalized => 1.0,
            ConstantsMode::Conservative { poi_cp, .. } => poi_cp,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConstantsMode::Normalized => "normalized",
            ConstantsMode::Conservative { .. } => "conservative",
        }
    }
}

/// The contraction constant C_{β,c}(κ,p) of the weighted stochastic
/// Young inequality:
///
/// C_p·[ 2^d|b|/(β−κc²d/2)
///     + 2^{d(3−p)/(2p)} Γ(1−d(p−1)/2)^{1/p} m_λ(p)
///       / (p^{(2+(2−p)d)/(2p)} (πκ)^{d(p−1)/(2p)} (β−κc²d/2)^{(2−d(p−1))/(2p)})
///     + (m_λ(2)+|ρ|)/(2κ(β−κc²/2))^{1/4} · 1{d=1, p≥2} ].
pub fn stoch_young_constant(
    spec: &LevyNoiseSpec,
    params: &KernelParams<f64>,
    p: f64,
    beta: f64,
    c: f64,
    mode: ConstantsMode,
) -> Result<f64, BoundsError> {
    let d = params.d as f64;
    let kappa = params.kappa;
    let crit = 1.0 + 2.0 / d;
    if !(1.0..crit).contains(&p) {
        return Err(BoundsError::Domain(format!("requires 1 <= p < 1+2/d, got p = {p}")));
    }
    if p < 2.0 && spec.gaussian != 0.0 {
        return Err(BoundsError::Domain(format!(
            "Gaussian part requires p >= 2, got p = {p} with rho = {}",
            spec.gaussian
        )));
    }
    if c < 0.0 {
        return Err(BoundsError::Domain(format!("spatial weight c must be >= 0, got {c}")));
    }
    let margin = beta - kappa * c * c * d / 2.0;
    if !(margin > 0.0) {
        return Err(BoundsError::Domain(format!(
            "beta must exceed kappa*c^2*d/2 = {}, got {beta}",
            kappa * c * c * d / 2.0
        )));
    }
    let b = spec.canonical_drift();
    let drift_term = 2f64.powi(params.d as i32) * b.abs() / margin;
    let m_p = spec.m_lambda(p)?;
    let jump_term = if m_p > 0.0 {
        let numer = 2f64.powf(d * (3.0 - p) / (2.0 * p))
            * special::gamma(1.0 - d * (p - 1.0) / 2.0).powf(1.0 / p)
            * m_p;
        let denom = p.powf((2.0 + (2.0 - p) * d) / (2.0 * p))
            * (std::f64::consts::PI * kappa).powf(d * (p - 1.0) / (2.0 * p))
            * margin.powf((2.0 - d * (p - 1.0)) / (2.0 * p));
        numer / denom
    } else {
        0.0
    };
    let martingale_term = if params.d == 1 && p >= 2.0 {
        let m2 = spec.m_lambda(2.0)?;
        if m2 > 0.0 || spec.gaussian != 0.0 {
            (m2 + spec.gaussian.abs()) / (2.0 * kappa * (beta - kappa * c * c / 2.0)).powf(0.25)
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(mode.bdg_cp() * (drift_term + jump_term + martingale_term))
}

/// Moment upper bounds derived from the contraction threshold.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Beta0Result {
    /// Smallest β with C_{β,c}(κ,p) ≤ 1/L.
    pub beta0: f64,
    /// Upper moment Lyapunov bound γ̄(p) ≤ p·β₀.
    pub upper_gamma_bound: f64,
    /// Front upper bound λ̄(p) ≤ β₀/c, present when c > 0.
    pub front_upper: Option<f64>,
}

/// Bisection (relative tolerance 1e−8) for the smallest β at which the
/// contraction constant drops to 1/L.
pub fn beta0(
    spec: &LevyNoiseSpec,
    params: &KernelParams<f64>,
    p: f64,
    c: f64,
    lipschitz: f64,
    mode: ConstantsMode,
) -> Result<Beta0Result, BoundsError> {
    if !(lipschitz > 0.0) {
        return Err(BoundsError::Domain(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    let target = 1.0 / lipschitz;
    let d = params.d as f64;
    let edge = params.kappa * c * c * d / 2.0;
    let eval = |beta: f64| stoch_young_constant(spec, params, p, beta, c, mode);
    // bracket: C is continuous and strictly decreasing on (edge, ∞) with
    // limit 0, so doubling the offset always finds a point below target
    let mut offset = (edge.abs() + 1.0) * 1e-6;
    let mut checked = eval(edge + offset)?;
    while checked > target {
        offset *= 2.0;
        if !offset.is_finite() {
            return Err(BoundsError::Domain("contraction constant never drops below 1/L".into()));
        }
        checked = eval(edge + offset)?;
    }
    let mut lo = edge;
    let mut hi = edge + offset;
    for _ in 0..200 {
        if (hi - lo) <= 1e-8 * hi.abs().max(1e-12) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if eval(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta0 = hi;
    Ok(Beta0Result {
        beta0,
        upper_gamma_bound: p * beta0,
        front_upper: if c > 0.0 { Some(beta0 / c) } else { None },
    })
}

/// Which heat-kernel level set truncates the renewal kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSet {
    /// {g(κ; t, x) > ε}: the kernel's own level set.
    Own,
    /// {g(1; t, x) > ε}: level set at unit diffusion, whose support does
    /// not depend on κ — the variant behind the κ → 0 asymptotics.
    UnitDiffusion,
}

/// Renewal kernel w_p(t) = C · [∫|z|^p 1{|z|>δ} λ(dz)]
///   / (1 ∨ λ({|z|>δ})·|level set|)^{1−p/2} · ∫ g^p 1{level set} dx,
/// optionally damped by a cable factor e^{rate·t}.
#[derive(Debug, Clone)]
pub struct RenewalKernel {
    params: KernelParams<f64>,
    p: f64,
    epsilon: f64,
    prefactor: f64,
    level_set: LevelSet,
    cable_rate: f64,
    horizon: f64,
}

impl RenewalKernel {
    pub fn new(
        spec: &LevyNoiseSpec,
        params: KernelParams<f64>,
        p: f64,
        epsilon: f64,
        delta: f64,
        mode: ConstantsMode,
        level_set: LevelSet,
    ) -> Result<RenewalKernel, BoundsError> {
        let crit = 1.0 + 2.0 / params.d as f64;
        if !(p > 1.0 && p < crit) {
            return Err(BoundsError::Domain(format!(
                "renewal kernel needs 1 < p < 1+2/d = {crit}, got {p}"
            )));
        }
        if !(epsilon > 0.0) {
            return Err(BoundsError::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        let rate = spec.mass_above(delta);
        if !(rate > 0.0) {
            return Err(BoundsError::Noise(crate::error::NoiseError::Degenerate { delta }));
        }
        let jump_moment = spec.abs_moment_above(p, delta)?;
        // the level-set volume entering the normalization is the one of the
        // truncating set itself
        let volume_params = match level_set {
            LevelSet::Own => params,
            LevelSet::UnitDiffusion => KernelParams::new(1.0, params.d)?,
        };
        let volume = kernel::super_level_volume(&volume_params, epsilon)?;
        let prefactor = mode.poi_cp() * mode.split_cp(p) * jump_moment
            / (1f64.max(rate * volume)).powf(1.0 - p / 2.0);
        let horizon = kernel::level_set_horizon(&volume_params, epsilon);
        Ok(RenewalKernel { params, p, epsilon, prefactor, level_set, cable_rate: 0.0, horizon })
    }

    /// Multiply the kernel by e^{rate·t} (e.g. rate = −p|b|σ₀ for the
    /// negative-drift cable machinery).
    pub fn with_cable_rate(mut self, rate: f64) -> Self {
        self.cable_rate = rate;
        self
    }

    /// End of the kernel's time support.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// w_p(t).
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.horizon {
            return 0.0;
        }
        let slice = match self.level_set {
            LevelSet::Own => kernel::slice_p_integral(&self.params, self.p, self.epsilon, t),
            LevelSet::UnitDiffusion => {
                kernel::slice_p_integral_unit_level(&self.params, self.p, self.epsilon, t)
            }
        };
        self.prefactor * (self.cable_rate * t).exp() * slice.unwrap_or(0.0)
    }

    /// Laplace transform ∫₀^∞ w_p(t) e^{−βt} dt by adaptive quadrature.
    /// For large β the integrand collapses into a spike of width 1/β at
    /// the origin, so the integral is evaluated in the rescaled variable
    /// s = βt, where the spike has unit width regardless of β.
    pub fn laplace(&self, beta: f64) -> f64 {
        let tol = QuadTol::new(1e-12, 1e-9);
        if beta * self.horizon <= 50.0 {
            return quad::integrate(
                |t: f64| self.eval(t) * (-beta * t).exp(),
                0.0,
                self.horizon,
                tol,
            );
        }
        let s_max = (beta * self.horizon).min(500.0);
        quad::integrate(|s: f64| self.eval(s / beta) * (-s).exp() / beta, 0.0, s_max, tol)
    }

    /// Total mass ∫₀^∞ w_p(t) dt.
    pub fn mass(&self) -> f64 {
        match (self.level_set, self.cable_rate) {
            // closed form available: prefactor · C_p/(κ ε^{1+2/d−p})
            (LevelSet::Own, rate) if rate == 0.0 => {
                self.prefactor
                    * kernel::truncated_p_integral(&self.params, self.p, self.epsilon)
                        .expect("validated at construction")
            }
            _ => self.laplace(0.0),
        }
    }

    /// Malthusian exponent of this kernel.
    pub fn malthusian_exponent(&self) -> f64 {
        malthusian_exponent(self.mass(), |beta| self.laplace(beta))
    }
}

/// Root β₁ of ∫ w(t) e^{−β₁t} dt = 1 for a kernel with the given total
/// mass; returns 0 when mass ≤ 1. Relative tolerance 1e−8.
pub fn malthusian_exponent(mass: f64, laplace: impl Fn(f64) -> f64) -> f64 {
    if !(mass > 1.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while laplace(hi) > 1.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        if (hi - lo) <= 1e-8 * hi.max(1e-12) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if laplace(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Numerical solution of the renewal (Volterra) equation
/// i(t) = a(t) + ∫₀^t w(t−s) i(s) ds on a uniform grid by trapezoidal
/// product integration. Returns (times, values).
pub fn renewal_solve(
    a: impl Fn(f64) -> f64,
    w: impl Fn(f64) -> f64,
    horizon: f64,
    steps: usize,
) -> (Vec<f64>, Vec<f64>) {
    assert!(horizon > 0.0 && steps >= 2, "need a positive horizon and at least 2 steps");
    let h = horizon / steps as f64;
    let ts: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let ws: Vec<f64> = ts.iter().map(|&t| w(t)).collect();
    let mut is = vec![0.0; steps + 1];
    is[0] = a(0.0);
    for k in 1..=steps {
        let mut conv = 0.5 * ws[k] * is[0];
        for j in 1..k {
            conv += ws[k - j] * is[j];
        }
        // implicit in the endpoint term ½·h·w(0)·i(t_k)
        is[k] = (a(ts[k]) + h * conv) / (1.0 - 0.5 * h * ws[0]);
    }
    (ts, is)
}

/// Multiplicative kernel modifier for the drift-removed (cable) form of
/// the equation: slices pick up a factor e^{p·b·σ₀·t}.
#[derive(Debug, Clone, Copy)]
pub struct CableTransform {
    pub b: f64,
    pub sigma0: f64,
}

impl CableTransform {
    pub fn new(b: f64, sigma0: f64) -> Result<Self, BoundsError> {
        if !(sigma0 > 0.0) {
            return Err(BoundsError::Domain(format!("sigma0 must be positive, got {sigma0}")));
        }
        Ok(CableTransform { b, sigma0 })
    }

    /// e^{p·b·σ₀·t}.
    pub fn factor(&self, p: f64, t: f64) -> f64 {
        (p * self.b * self.sigma0 * t).exp()
    }

    /// On a level set with time support [0, T] the factor is pinched in
    /// [e^{−p|b|σ₀T}, e^{p|b|σ₀T}].
    pub fn factor_range(&self, p: f64, horizon: f64) -> (f64, f64) {
        let m = (p * self.b.abs() * self.sigma0 * horizon).exp();
        (1.0 / m, m)
    }
}

/// Normalized rate limit of a bound curve β(p) as p → 1+2/d, where
/// log β ~ (r/x)(|log x| + const) with x = 1+2/d−p: regresses
/// x·log β(p) against |log x| and returns the slope r. The slope form
/// absorbs the unknown constant exactly, unlike intercept extrapolation.
/// The expected limit is 2/d.
pub fn asymptotic_rate_p(points: &[(f64, f64)], d: u32) -> Result<f64, BoundsError> {
    let crit = 1.0 + 2.0 / d as f64;
    if points.len() < 3 {
        return Err(BoundsError::FitQuality(format!(
            "need at least 3 grid points for the p-rate fit, got {}",
            points.len()
        )));
    }
    let mut us = Vec::new();
    let mut qs = Vec::new();
    for &(p, beta) in points {
        let x = crit - p;
        if !(x > 0.0 && x < 0.3) {
            return Err(BoundsError::FitQuality(format!(
                "p = {p} is outside the asymptotic window ({}, {crit})",
                crit - 0.3
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(BoundsError::FitQuality(format!(
                "bound value must be positive and finite at p = {p}"
            )));
        }
        us.push(x.ln().abs());
        qs.push(x * beta.ln());
    }
    let (slope, _) = fit::linear_fit(&us, &qs);
    Ok(slope)
}

/// Log-log slope of a bound curve β(κ) as κ → 0; the expected slope is
/// −(p−1)/(1+2/d−p). The grid must span at least two decades.
pub fn asymptotic_rate_kappa(points: &[(f64, f64)]) -> Result<f64, BoundsError> {
    if points.len() < 3 {
        return Err(BoundsError::FitQuality(format!(
            "need at least 3 grid points for the kappa-rate fit, got {}",
            points.len()
        )));
    }
    let kappas: Vec<f64> = points.iter().map(|&(k, _)| k).collect();
    let betas: Vec<f64> = points.iter().map(|&(_, b)| b).collect();
    if kappas.iter().any(|&k| !(k > 0.0)) || betas.iter().any(|&b| !(b > 0.0)) {
        return Err(BoundsError::FitQuality("kappa grid and bound values must be positive".into()));
    }
    let kmin = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = kappas.iter().cloned().fold(0.0, f64::max);
    if kmax / kmin < 99.0 {
        return Err(BoundsError::FitQuality(format!(
            "kappa grid must span at least two decades, got ratio {}",
            kmax / kmin
        )));
    }
    Ok(fit::log_log_slope(&kappas, &betas))
}

/// Front-speed bracket machinery.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrontRateBounds {
    /// Weight c minimizing β₀(c)/c.
    pub upper_c: f64,
    /// Optimized upper front bound min_c β₀(c)/c.
    pub upper_bound: f64,
    /// Largest α̃ at which the certified cone criterion still fires.
    pub lower_alpha_tilde: f64,
    /// Lower front bound α = α̃/√d.
    pub lower_alpha: f64,
    /// Whether α̃ satisfies the closed-form validity condition
    /// α̃² ε^{−2/d} ≥ 2πκ².
    pub lower_valid: bool,
}

/// Upper front bound by optimizing β₀(c)/c over the spatial weight c, and
/// lower front bound from the cone-integral criterion
/// C·F(α̃)/(2d) > threshold (threshold = 4 by default).
#[allow(clippy::too_many_arguments)]
pub fn front_rate_bounds(
    spec: &LevyNoiseSpec,
    params: &KernelParams<f64>,
    p: f64,
    epsilon: f64,
    delta: f64,
    lipschitz: f64,
    mode: ConstantsMode,
    threshold: f64,
) -> Result<FrontRateBounds, BoundsError> {
    let d = params.d as f64;
    let crit = 1.0 + 2.0 / d;
    if !(p > 1.0 && p < crit) {
        return Err(BoundsError::Domain(format!("requires 1 < p < 1+2/d, got {p}")));
    }
    // --- upper bound: golden-section over log c -----------------------
    let objective = |lc: f64| -> Result<f64, BoundsError> {
        let c = lc.exp();
        Ok(beta0(spec, params, p, c, lipschitz, mode)?.beta0 / c)
    };
    // coarse bracket of the minimum
    let mut best = (f64::INFINITY, 0.0);
    // wide bracket: the optimal weight scales like a power of κ and can
    // leave [e^{-20}, e^{20}] already at moderately small diffusivities
    let scan: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.5).collect();
    for &lc in &scan {
        let v = objective(lc)?;
        if v < best.0 {
            best = (v, lc);
        }
    }
    let (mut a, mut b) = (best.1 - 0.5, best.1 + 0.5);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c1 = b - phi * (b - a);
    let mut c2 = a + phi * (b - a);
    let mut f1 = objective(c1)?;
    let mut f2 = objective(c2)?;
    for _ in 0..60 {
        if f1 < f2 {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = objective(c1)?;
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = objective(c2)?;
        }
    }
    let upper_lc = 0.5 * (a + b);
    let upper_c = upper_lc.exp();
    let upper_bound = objective(upper_lc)?;

    // --- lower bound: solve C·A·α̃^{−2w}/(2d) = threshold ---------------
    let rate = spec.mass_above(delta);
    if !(rate > 0.0) {
        return Err(BoundsError::Noise(crate::error::NoiseError::Degenerate { delta }));
    }
    let jump_moment = spec.abs_moment_above(p, delta)?;
    let volume = kernel::super_level_volume(params, epsilon)?;
    let c_value = mode.poi_cp() * jump_moment * (1f64.max(rate * volume)).powf(p / 2.0 - 1.0);
    // cone-integral closed form F(α̃) = A·α̃^{−2w}, w = 1 − d(p−1)/2
    let w = 1.0 - d * (p - 1.0) / 2.0;
    let amp = 2.0 * (2.0 * params.kappa).powf(1.0 - d * (p - 1.0))
        * special::incomplete_gamma_lower(1.0 + d * (1.0 - p / 2.0), 1.0 / 6.0)
        / (d * special::gamma(d / 2.0)
            * std::f64::consts::PI.powf(d * (p - 1.0) / 2.0)
            * p.powf(1.0 + d * (1.0 - p / 2.0))
            * (crit - p));
    let lower_alpha_tilde = (c_value * amp / (2.0 * d * threshold)).powf(1.0 / (2.0 * w));
    let lower_valid = lower_alpha_tilde * lower_alpha_tilde * epsilon.powf(-2.0 / d)
        >= 2.0 * std::f64::consts::PI * params.kappa * params.kappa;
    Ok(FrontRateBounds {
        upper_c,
        upper_bound,
        lower_alpha_tilde,
        lower_alpha: lower_alpha_tilde / d.sqrt(),
        lower_valid,
    })
}

/// Bundle of the analytic constants for one parameter point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Contraction constant evaluated at β₀ (≈ 1/L).
    pub c_beta_c: f64,
    pub beta0: f64,
    /// γ̄(p) ≤ p·β₀.
    pub upper_gamma_bound: f64,
    /// λ̄(p) ≤ β₀/c, when c > 0.
    pub front_upper: Option<f64>,
    /// ∫ w_p(t) dt.
    pub renewal_mass: f64,
    /// Certified lower-bracket exponent β₁ (0 when the mass is ≤ 1).
    pub malthusian_beta1: f64,
    pub constants_mode: String,
}

/// Assemble upper and lower bracket quantities for one (p, c) point.
#[allow(clippy::too_many_arguments)]
pub fn bound_report(
    spec: &LevyNoiseSpec,
    params: &KernelParams<f64>,
    p: f64,
    c: f64,
    lipschitz: f64,
    epsilon: f64,
    delta: f64,
    mode: ConstantsMode,
) -> Result<BoundReport, BoundsError> {
    let up = beta0(spec, params, p, c, lipschitz, mode)?;
    let kernel = RenewalKernel::new(spec, *params, p, epsilon, delta, mode, LevelSet::Own)?;
    let renewal_mass = kernel.mass();
    let malthusian_beta1 = kernel.malthusian_exponent();
    let c_beta_c = stoch_young_constant(spec, params, p, up.beta0, c, mode)?;
    Ok(BoundReport {
        c_beta_c,
        beta0: up.beta0,
        upper_gamma_bound: up.upper_gamma_bound,
        front_upper: up.front_upper,
        renewal_mass,
        malthusian_beta1,
        constants_mode: mode.tag().to_string(),
    })
}

/// Default truncation level: the largest δ retaining at least half the
/// total jump mass (bisection on δ).
pub fn default_delta(spec: &LevyNoiseSpec) -> f64 {
    let total = spec.total_rate();
    if total <= 0.0 {
        return 0.0;
    }
    let target = 0.5 * total;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while spec.mass_above(hi) >= target {
        hi *= 2.0;
        if hi > 1e300 {
            return lo;
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if spec.mass_above(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Pick ε maximizing the certified Malthusian root by golden-section
/// search over log ε.
pub fn optimize_epsilon(
    spec: &LevyNoiseSpec,
    params: &KernelParams<f64>,
    p: f64,
    delta: f64,
    mode: ConstantsMode,
    level_set: LevelSet,
) -> Result<(f64, f64), BoundsError> {
    let root = |le: f64| -> Result<f64, BoundsError> {
        let kernel =
            RenewalKernel::new(spec, *params, p, le.exp(), delta, mode, level_set)?;
        Ok(kernel.malthusian_exponent())
    };
    let mut best = (root(-3.0)?, -3.0);
    for i in -24..=4 {
        let le = i as f64 * 0.5;
        let v = root(le)?;
        if v > best.0 {
            best = (v, le);
        }
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.1 - 0.5, best.1 + 0.5);
    let mut c1 = b - phi * (b - a);
    let mut c2 = a + phi * (b - a);
    let mut f1 = root(c1)?;
    let mut f2 = root(c2)?;
    for _ in 0..40 {
        if f1 > f2 {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = root(c1)?;
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = root(c2)?;
        }
    }
    let le = 0.5 * (a + b);
    Ok((le.exp(), root(le)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::NoiseError;
    use approx::assert_relative_eq;

    fn kp(kappa: f64, d: u32) -> KernelParams<f64> {
        KernelParams::new(kappa, d).unwrap()
    }

    #[test]
    fn stoch_young_zero_noise_vanishes() {
        let spec = LevyNoiseSpec::deterministic(0.0);
        let v = stoch_young_constant(&spec, &kp(1.0, 1), 1.5, 2.0, 0.0, ConstantsMode::Normalized)
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn stoch_young_hand_assembled_middle_summand() {
        // d=1, p=1.5, λ=δ₁ compensated (canonical drift 0), ρ=0, κ=1, c=0, β=10
        let mut spec = LevyNoiseSpec::standard_poisson();
        spec.jumps_compensated = true;
        assert_eq!(spec.canonical_drift(), 0.0);
        let v = stoch_young_constant(&spec, &kp(1.0, 1), 1.5, 10.0, 0.0, ConstantsMode::Normalized)
            .unwrap();
        let p: f64 = 1.5;
        let expect = 2f64.powf((3.0 - p) / (2.0 * p))
            * special::gamma(1.0 - (p - 1.0) / 2.0).powf(1.0 / p)
            / (p.powf((2.0 + (2.0 - p)) / (2.0 * p))
                * std::f64::consts::PI.powf((p - 1.0) / (2.0 * p))
                * 10f64.powf((2.0 - (p - 1.0)) / (2.0 * p)));
        assert_relative_eq!(v, expect, max_relative = 1e-12);
    }

    #[test]
    fn stoch_young_monotone_decreasing_in_beta() {
        let spec = LevyNoiseSpec {
            drift: 0.5,
            jumps: vec![crate::noise::JumpComponent::Atom { size: 1.0, rate: 1.0 }],
            ..LevyNoiseSpec::deterministic(0.0)
        };
        let params = kp(0.7, 1);
        let mut prev = f64::INFINITY;
        for &beta in &[0.5, 1.0, 2.0, 4.0, 8.0, 20.0] {
            let v = stoch_young_constant(&spec, &params, 2.2, beta, 0.3, ConstantsMode::Normalized)
                .unwrap();
            assert!(v < prev);
            prev = v;
        }
        // domain checks
        assert!(stoch_young_constant(&spec, &params, 3.1, 1.0, 0.0, ConstantsMode::Normalized)
            .is_err());
        let gauss = LevyNoiseSpec { gaussian: 1.0, ..LevyNoiseSpec::deterministic(0.0) };
        assert!(stoch_young_constant(&gauss, &params, 1.5, 1.0, 0.0, ConstantsMode::Normalized)
            .is_err());
    }

    #[test]
    fn beta0_straddles_the_threshold() {
        let spec = LevyNoiseSpec::standard_poisson();
        let params = kp(1.0, 1);
        let r = beta0(&spec, &params, 1.5, 0.0, 1.0, ConstantsMode::Normalized).unwrap();
        let below = stoch_young_constant(
            &spec,
            &params,
            1.5,
            r.beta0 * (1.0 - 1e-6),
            0.0,
            ConstantsMode::Normalized,
        )
        .unwrap();
        let above = stoch_young_constant(
            &spec,
            &params,
            1.5,
            r.beta0 * (1.0 + 1e-6),
            0.0,
            ConstantsMode::Normalized,
        )
        .unwrap();
        assert!(below >= 1.0 && above <= 1.0, "C must straddle 1/L at beta0: {below}, {above}");
        assert_relative_eq!(r.upper_gamma_bound, 1.5 * r.beta0, max_relative = 1e-12);
        // doubling L tightens the threshold and raises beta0
        let r2 = beta0(&spec, &params, 1.5, 0.0, 2.0, ConstantsMode::Normalized).unwrap();
        assert!(r2.beta0 > r.beta0);
        // trivial noise: beta0 collapses to the left edge kappa c^2 d / 2
        let trivial = LevyNoiseSpec::deterministic(0.0);
        let r3 = beta0(&trivial, &params, 1.5, 2.0, 1.0, ConstantsMode::Normalized).unwrap();
        assert_relative_eq!(r3.beta0, 1.0 * 4.0 / 2.0, max_relative = 1e-6);
        assert_relative_eq!(r3.front_upper.unwrap(), r3.beta0 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn renewal_kernel_mass_blowup_and_scalings() {
        let spec = LevyNoiseSpec::standard_poisson();
        // mass → ∞ as p ↑ 1+2/d (d=1, ε close to 1 so the Γ-blowup dominates)
        let mut prev = 0.0;
        for i in 0..10 {
            let p = 2.6 + 0.039 * i as f64;
            let k = RenewalKernel::new(
                &spec,
                kp(1.0, 1),
                p,
                0.6,
                0.5,
                ConstantsMode::Normalized,
                LevelSet::Own,
            )
            .unwrap();
            let m = k.mass();
            assert!(m > prev, "mass must blow up monotonically at p = {p}");
            prev = m;
        }
        // κ-scaling of the mass: slope −p/2 over a κ-grid
        let p = 1.5;
        let mut pts = Vec::new();
        for i in 0..9 {
            let kappa = 1e-4 * 10f64.powf(i as f64 / 4.0);
            let k = RenewalKernel::new(
                &spec,
                kp(kappa, 1),
                p,
                0.1,
                0.5,
                ConstantsMode::Normalized,
                LevelSet::Own,
            )
            .unwrap();
            pts.push((kappa, k.mass()));
        }
        let slope = fit::log_log_slope(
            &pts.iter().map(|&(k, _)| k).collect::<Vec<_>>(),
            &pts.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        );
        assert!(
            (slope + p / 2.0).abs() < 0.02,
            "kappa mass slope {slope} should be -p/2 = {}",
            -p / 2.0
        );
        // ε-scaling (d=1): mass ∝ ε^{−p/2} as ε → 0
        let mut pts = Vec::new();
        for i in 0..9 {
            let eps = 1e-5 * 10f64.powf(i as f64 / 4.0);
            let k = RenewalKernel::new(
                &spec,
                kp(1.0, 1),
                p,
                eps,
                0.5,
                ConstantsMode::Normalized,
                LevelSet::Own,
            )
            .unwrap();
            pts.push((eps, k.mass()));
        }
        let slope = fit::log_log_slope(
            &pts.iter().map(|&(e, _)| e).collect::<Vec<_>>(),
            &pts.iter().map(|&(_, m)| m).collect::<Vec<_>>(),
        );
        assert!(
            (slope + p / 2.0).abs() < 0.02,
            "epsilon mass slope {slope} should be -p/2"
        );
        // degenerate truncation
        let err = RenewalKernel::new(
            &spec,
            kp(1.0, 1),
            1.5,
            0.1,
            2.0,
            ConstantsMode::Normalized,
            LevelSet::Own,
        )
        .unwrap_err();
        assert!(matches!(err, BoundsError::Noise(NoiseError::Degenerate { .. })));
    }

    #[test]
    fn renewal_kernel_mass_closed_form_matches_quadrature() {
        let spec = LevyNoiseSpec::standard_poisson();
        let k = RenewalKernel::new(
            &spec,
            kp(0.8, 2),
            1.7,
            0.15,
            0.5,
            ConstantsMode::Normalized,
            LevelSet::Own,
        )
        .unwrap();
        assert_relative_eq!(k.mass(), k.laplace(0.0), max_relative = 1e-6);
    }

    #[test]
    fn malthusian_analytic_exponential_kernel() {
        // w(t) = 2λe^{−λt}: mass 2, Laplace 2λ/(λ+β) ⇒ β₁ = λ
        for &lambda in &[0.7, 1.0, 3.0] {
            let beta1 = malthusian_exponent(2.0, |beta| 2.0 * lambda / (lambda + beta));
            assert_relative_eq!(beta1, lambda, max_relative = 1e-6);
        }
        // boundary: mass ≤ 1 ⇒ 0
        assert_eq!(malthusian_exponent(1.0, |beta| 1.0 / (1.0 + beta)), 0.0);
        assert_eq!(malthusian_exponent(0.3, |beta| 0.3 / (1.0 + beta)), 0.0);
        // defining equation holds at the root of a real renewal kernel
        let spec = LevyNoiseSpec::standard_poisson();
        let k = RenewalKernel::new(
            &spec,
            kp(0.05, 1),
            1.5,
            0.05,
            0.5,
            ConstantsMode::Normalized,
            LevelSet::Own,
        )
        .unwrap();
        assert!(k.mass() > 1.0, "test config must have supercritical mass");
        let beta1 = k.malthusian_exponent();
        assert!(beta1 > 0.0);
        assert_relative_eq!(k.laplace(beta1), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn renewal_solve_against_closed_form() {
        // w ≡ 0 → i = a
        let (ts, is) = renewal_solve(|t| 1.0 + t, |_| 0.0, 5.0, 100);
        for (&t, &i) in ts.iter().zip(&is) {
            assert_relative_eq!(i, 1.0 + t, max_relative = 1e-12);
        }
        // a ≡ 1, w = 2λe^{−λt} → i(t) = 2e^{λt} − 1
        let lambda = 1.3;
        let (ts, is) = renewal_solve(|_| 1.0, |t| 2.0 * lambda * (-lambda * t).exp(), 6.0, 4000);
        for (&t, &i) in ts.iter().zip(&is) {
            assert_relative_eq!(i, 2.0 * (lambda * t).exp() - 1.0, max_relative = 2e-3);
        }
        // late-time log-slope matches the Malthusian root within 2%
        let slope = fit::late_time_log_slope(&ts, &is, 0.5).unwrap();
        assert!((slope - lambda).abs() / lambda < 0.02, "slope {slope} vs lambda {lambda}");
    }

    #[test]
    fn renewal_solve_is_monotone_in_forcing_and_kernel() {
        use rand::Rng;
        let mut rng = crate::rng::stream(5, 0, 0);
        for _ in 0..5 {
            let a1: f64 = rng.gen_range(0.5..2.0);
            let a2 = a1 + rng.gen_range(0.0..1.0);
            let w1: f64 = rng.gen_range(0.1..1.0);
            let w2 = w1 + rng.gen_range(0.0..1.0);
            let rate: f64 = rng.gen_range(0.3..2.0);
            let (_, small) = renewal_solve(|_| a1, |t| w1 * (-rate * t).exp(), 4.0, 400);
            let (_, big) = renewal_solve(|_| a2, |t| w2 * (-rate * t).exp(), 4.0, 400);
            for (s, b) in small.iter().zip(&big) {
                assert!(b >= s);
            }
        }
    }

    #[test]
    fn cable_transform_behaviour() {
        assert!(CableTransform::new(1.0, 0.0).is_err());
        let id = CableTransform::new(0.0, 1.0).unwrap();
        assert_eq!(id.factor(1.7, 3.0), 1.0);
        let neg = CableTransform::new(-0.4, 1.2).unwrap();
        let p = 1.5;
        let params = kp(1.0, 1);
        let eps = 0.1;
        let horizon = kernel::level_set_horizon(&params, eps);
        // pointwise damping and the pinched truncated integral
        let plain = quad::integrate(
            |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    kernel::slice_p_integral(&params, p, eps, t).unwrap()
                }
            },
            0.0,
            horizon,
            QuadTol::default(),
        );
        let modified = quad::integrate(
            |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    neg.factor(p, t) * kernel::slice_p_integral(&params, p, eps, t).unwrap()
                }
            },
            0.0,
            horizon,
            QuadTol::default(),
        );
        assert!(modified <= plain);
        let (lo, _) = neg.factor_range(p, horizon);
        assert!(modified >= lo * plain * (1.0 - 1e-9));
    }

    #[test]
    fn asymptotic_rate_fits_on_synthetic_curves() {
        for d in [1u32, 2] {
            let rate = 2.0 / d as f64;
            let crit = 1.0 + rate;
            // stop before (rate/x)^{rate/x} overflows f64
            let points: Vec<(f64, f64)> = (1..12)
                .map(|i| {
                    let x = 0.25 * 0.8f64.powi(i);
                    (crit - x, (rate / x).powf(rate / x))
                })
                .collect();
            let fit = asymptotic_rate_p(&points, d).unwrap();
            assert_relative_eq!(fit, rate, max_relative = 1e-8);
        }
        // κ-slope on a synthetic power law
        let points: Vec<(f64, f64)> =
            (0..10).map(|i| {
                let k = 1e-4 * 10f64.powf(i as f64 / 3.0);
                (k, 2.7 / k)
            }).collect();
        assert_relative_eq!(asymptotic_rate_kappa(&points).unwrap(), -1.0, max_relative = 1e-10);
        // fit-quality guards
        assert!(matches!(
            asymptotic_rate_p(&[(2.9, 1.0), (2.95, 2.0)], 1),
            Err(BoundsError::FitQuality(_))
        ));
        assert!(matches!(
            asymptotic_rate_p(&[(2.0, 1.0), (2.9, 2.0), (2.95, 3.0)], 1),
            Err(BoundsError::FitQuality(_))
        ));
        assert!(matches!(
            asymptotic_rate_kappa(&[(0.1, 1.0), (0.2, 2.0), (0.5, 3.0)]),
            Err(BoundsError::FitQuality(_))
        ));
    }

    #[test]
    fn conservative_bracket_orders_correctly() {
        // β₁ ≤ p·β₀ whenever both are defined in conservative mode
        let spec = LevyNoiseSpec::standard_poisson();
        let mode = ConstantsMode::conservative();
        for &(kappa, p) in &[(0.05, 1.5), (0.02, 1.8), (0.1, 1.3)] {
            let params = kp(kappa, 1);
            let report = bound_report(&spec, &params, p, 0.0, 1.0, 0.05, 0.5, mode).unwrap();
            assert!(
                report.malthusian_beta1 <= report.upper_gamma_bound,
                "bracket violated at kappa={kappa}, p={p}: {} > {}",
                report.malthusian_beta1,
                report.upper_gamma_bound
            );
            assert_eq!(report.constants_mode, "conservative");
            assert!(report.malthusian_beta1 > 0.0 || report.renewal_mass <= 1.0);
        }
    }

    #[test]
    fn front_bounds_are_positive_and_finite() {
        let spec = LevyNoiseSpec::standard_poisson();
        let params = kp(0.5, 1);
        let fr = front_rate_bounds(
            &spec,
            &params,
            1.5,
            0.1,
            0.5,
            1.0,
            ConstantsMode::Normalized,
            4.0,
        )
        .unwrap();
        assert!(fr.upper_bound > 0.0 && fr.upper_bound.is_finite());
        assert!(fr.upper_c > 0.0);
        assert!(fr.lower_alpha > 0.0 && fr.lower_alpha.is_finite());
        assert_relative_eq!(fr.lower_alpha, fr.lower_alpha_tilde, max_relative = 1e-12);
        // the optimum of β₀(c)/c beats nearby weights
        for &factor in &[0.8, 1.25] {
            let c = fr.upper_c * factor;
            let v = beta0(&spec, &params, 1.5, c, 1.0, ConstantsMode::Normalized)
                .unwrap()
                .beta0
                / c;
            assert!(v >= fr.upper_bound * (1.0 - 1e-6));
        }
    }

    #[test]
    fn default_delta_halves_the_mass() {
        let spec = LevyNoiseSpec {
            jumps: vec![crate::noise::JumpComponent::Exponential { intensity: 2.0, scale: 1.0 }],
            ..LevyNoiseSpec::deterministic(0.0)
        };
        let delta = default_delta(&spec);
        // mass above δ = 2e^{−δ} = 1 ⇒ δ = ln 2
        assert_relative_eq!(delta, 2f64.ln(), max_relative = 1e-6);
        assert_eq!(default_delta(&LevyNoiseSpec::deterministic(0.0)), 0.0);
    }
}
