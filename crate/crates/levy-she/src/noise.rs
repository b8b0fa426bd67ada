//! Lévy space–time white noise: specification, moment functionals and
//! box sampling.
//!
//! The noise decomposes as b·dtdx + ρ·W(dt,dx) + jump part, where the jump
//! measure λ is a finite list of atoms and/or parametric families. All
//! families are finite-activity; δ-truncation removes jumps with |z| ≤ δ
//! and (optionally) keeps the retained jumps compensated, which manifests
//! as an effective drift b − ∫z 1{|z|>δ} λ(dz).

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::NoiseError;
use crate::special;

/// One additive piece of the jump measure λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpComponent {
    /// λ = rate·δ_size.
    Atom { size: f64, rate: f64 },
    /// Density (intensity/scale)·e^{−z/scale} on (0, ∞); total mass = intensity.
    Exponential { intensity: f64, scale: f64 },
    /// Symmetric density (intensity/2scale)·e^{−|z|/scale}; total mass = intensity.
    TwoSidedExponential { intensity: f64, scale: f64 },
    /// Density intensity·α·x_min^α·z^{−α−1} on (x_min, ∞); total mass = intensity.
    /// `exponent` is the tail index α; moments of order ≥ α diverge.
    ParetoCutoff { intensity: f64, exponent: f64, x_min: f64 },
}

impl JumpComponent {
    pub(crate) fn validate(&self) -> Result<(), NoiseError> {
        let bad = |msg: String| Err(NoiseError::Invalid(msg));
        match *self {
            JumpComponent::Atom { size, rate } => {
                if size == 0.0 || !size.is_finite() {
                    return bad(format!("atom size must be finite and nonzero, got {size}"));
                }
                if !(rate > 0.0) || !rate.is_finite() {
                    return bad(format!("atom rate must be positive, got {rate}"));
                }
            }
            JumpComponent::Exponential { intensity, scale }
            | JumpComponent::TwoSidedExponential { intensity, scale } => {
                if !(intensity > 0.0) || !intensity.is_finite() {
                    return bad(format!("intensity must be positive, got {intensity}"));
                }
                if !(scale > 0.0) || !scale.is_finite() {
                    return bad(format!("scale must be positive, got {scale}"));
                }
            }
            JumpComponent::ParetoCutoff { intensity, exponent, x_min } => {
                if !(intensity > 0.0) || !intensity.is_finite() {
                    return bad(format!("intensity must be positive, got {intensity}"));
                }
                if !(exponent > 0.0) || !exponent.is_finite() {
                    return bad(format!("tail exponent must be positive, got {exponent}"));
                }
                if !(x_min > 0.0) || !x_min.is_finite() {
                    return bad(format!("x_min must be positive, got {x_min}"));
                }
            }
        }
        Ok(())
    }

    fn support_nonnegative(&self) -> bool {
        match *self {
            JumpComponent::Atom { size, .. } => size > 0.0,
            JumpComponent::Exponential { .. } | JumpComponent::ParetoCutoff { .. } => true,
            JumpComponent::TwoSidedExponential { .. } => false,
        }
    }

    /// λ({|z| > δ}).
    fn mass_above(&self, delta: f64) -> f64 {
        match *self {
            JumpComponent::Atom { size, rate } => {
                if size.abs() > delta {
                    rate
                } else {
                    0.0
                }
            }
            JumpComponent::Exponential { intensity, scale }
            | JumpComponent::TwoSidedExponential { intensity, scale } => {
                intensity * (-delta.max(0.0) / scale).exp()
            }
            JumpComponent::ParetoCutoff { intensity, exponent, x_min } => {
                if delta <= x_min {
                    intensity
                } else {
                    intensity * (x_min / delta).powf(exponent)
                }
            }
        }
    }

    /// ∫ |z|^p 1{|z|>δ} λ(dz); `None` when the tail integral is infinite.
    fn abs_moment_above(&self, p: f64, delta: f64) -> Option<f64> {
        let d = delta.max(0.0);
        match *self {
            JumpComponent::Atom { size, rate } => {
                Some(if size.abs() > d { rate * size.abs().powf(p) } else { 0.0 })
            }
            JumpComponent::Exponential { intensity, scale }
            | JumpComponent::TwoSidedExponential { intensity, scale } => {
                // (intensity/scale) ∫_δ^∞ z^p e^{−z/scale} dz
                //   = intensity·scale^p·(Γ(p+1) − γ(p+1, δ/scale))
                let upper = special::gamma(p + 1.0)
                    - special::incomplete_gamma_lower(p + 1.0, d / scale);
                Some(intensity * scale.powf(p) * upper)
            }
            JumpComponent::ParetoCutoff { intensity, exponent, x_min } => {
                if p >= exponent {
                    return None;
                }
                let m = d.max(x_min);
                Some(intensity * exponent / (exponent - p) * x_min.powf(exponent)
                    * m.powf(p - exponent))
            }
        }
    }

    /// ∫ z 1{|z|>δ} λ(dz) (signed).
    fn signed_mean_above(&self, delta: f64) -> f64 {
        match *self {
            JumpComponent::Atom { size, rate } => {
                if size.abs() > delta.max(0.0) {
                    rate * size
                } else {
                    0.0
                }
            }
            JumpComponent::TwoSidedExponential { .. } => 0.0,
            _ => self.abs_moment_above(1.0, delta).expect("first moment finite"),
        }
    }

    /// Draw one jump size conditioned on |z| > δ (requires mass_above(δ) > 0).
    fn sample_above<G: Rng>(&self, delta: f64, rng: &mut G) -> f64 {
        let d = delta.max(0.0);
        match *self {
            JumpComponent::Atom { size, .. } => size,
            JumpComponent::Exponential { scale, .. } => {
                // memorylessness: conditional law above δ is δ + Exp(scale)
                let e: f64 = Exp1.sample(rng);
                d + scale * e
            }
            JumpComponent::TwoSidedExponential { scale, .. } => {
                let e: f64 = Exp1.sample(rng);
                let magnitude = d + scale * e;
                if rng.gen::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            JumpComponent::ParetoCutoff { exponent, x_min, .. } => {
                let m = d.max(x_min);
                let u: f64 = rng.gen::<f64>();
                m * (1.0 - u).powf(-1.0 / exponent)
            }
        }
    }
}

/// Specification of the driving noise Λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyNoiseSpec {
    /// Drift density b per unit space-time volume.
    #[serde(default)]
    pub drift: f64,
    /// Gaussian coefficient ρ.
    #[serde(default)]
    pub gaussian: f64,
    /// Jump measure components.
    #[serde(default)]
    pub jumps: Vec<JumpComponent>,
    /// Active truncation threshold: jumps with |z| ≤ δ_sim are removed.
    #[serde(default)]
    pub delta_sim: f64,
    /// When set, the retained jump part enters as the compensated integral
    /// ∫z(μ−ν), i.e. the effective drift is b − ∫z 1{|z|>δ_sim} λ(dz).
    #[serde(default)]
    pub jumps_compensated: bool,
    /// Declares support in (0,∞) with ρ = 0 (comparison-principle hypothesis).
    #[serde(default)]
    pub nonnegative: bool,
}

impl LevyNoiseSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !self.drift.is_finite() || !self.gaussian.is_finite() {
            return Err(NoiseError::Invalid("drift and gaussian must be finite".into()));
        }
        if !self.delta_sim.is_finite() || self.delta_sim < 0.0 {
            return Err(NoiseError::Invalid(format!(
                "delta_sim must be finite and >= 0, got {}",
                self.delta_sim
            )));
        }
        for j in &self.jumps {
            j.validate()?;
        }
        if self.nonnegative {
            if self.gaussian != 0.0 {
                return Err(NoiseError::Invalid(
                    "nonnegative noise requires gaussian coefficient rho = 0".into(),
                ));
            }
            if let Some(j) = self.jumps.iter().find(|j| !j.support_nonnegative()) {
                return Err(NoiseError::Invalid(format!(
                    "nonnegative noise requires jump support in (0,inf), violated by {j:?}"
                )));
            }
        }
        Ok(())
    }

    /// Pure-drift helper (no noise at all).
    pub fn deterministic(drift: f64) -> Self {
        LevyNoiseSpec {
            drift,
            gaussian: 0.0,
            jumps: Vec::new(),
            delta_sim: 0.0,
            jumps_compensated: false,
            nonnegative: drift >= 0.0,
        }
    }

    /// Single atom λ = rate·δ_size, uncompensated.
    pub fn atom(size: f64, rate: f64) -> Self {
        LevyNoiseSpec {
            drift: 0.0,
            gaussian: 0.0,
            jumps: vec![JumpComponent::Atom { size, rate }],
            delta_sim: 0.0,
            jumps_compensated: false,
            nonnegative: size > 0.0,
        }
    }

    /// The default benchmark noise λ = δ₁ (unit-size, unit-rate jumps).
    pub fn standard_poisson() -> Self {
        Self::atom(1.0, 1.0)
    }

    /// Total retained jump rate λ({|z| > δ_sim}).
    pub fn total_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.mass_above(self.delta_sim)).sum()
    }

    /// λ({|z| > δ}) for an arbitrary threshold ≥ δ_sim.
    pub fn mass_above(&self, delta: f64) -> f64 {
        let d = delta.max(self.delta_sim);
        self.jumps.iter().map(|j| j.mass_above(d)).sum()
    }

    /// ∫ |z|^p 1{|z|>δ_sim} λ(dz), the p-th absolute jump moment.
    pub fn abs_moment(&self, p: f64) -> Result<f64, NoiseError> {
        self.abs_moment_above(p, self.delta_sim)
    }

    /// ∫ |z|^p 1{|z|>δ} λ(dz) for δ ≥ δ_sim.
    pub fn abs_moment_above(&self, p: f64, delta: f64) -> Result<f64, NoiseError> {
        let d = delta.max(self.delta_sim);
        let mut total = 0.0;
        for j in &self.jumps {
            match j.abs_moment_above(p, d) {
                Some(v) => total += v,
                None => return Err(NoiseError::MomentUndefined { order: p }),
            }
        }
        Ok(total)
    }

    /// m_λ(p) = (∫|z|^p λ(dz))^{1/p} over the retained jumps.
    pub fn m_lambda(&self, p: f64) -> Result<f64, NoiseError> {
        if p < 1.0 {
            return Err(NoiseError::Invalid(format!("m_lambda requires p >= 1, got {p}")));
        }
        Ok(self.abs_moment(p)?.powf(1.0 / p))
    }

    /// ∫ z 1{|z|>δ_sim} λ(dz) (signed mean of the retained jumps).
    pub fn signed_jump_mean(&self) -> f64 {
        self.jumps.iter().map(|j| j.signed_mean_above(self.delta_sim)).sum()
    }

    /// Drift density actually seen by the solution: b minus the compensator
    /// of the retained jumps when they enter in compensated form.
    pub fn effective_drift(&self) -> f64 {
        if self.jumps_compensated {
            self.drift - self.signed_jump_mean()
        } else {
            self.drift
        }
    }

    /// Drift of the canonical decomposition b·dtdx + ρW + ∫z(μ−ν): equals
    /// the effective drift plus the compensator of the retained jumps.
    pub fn canonical_drift(&self) -> f64 {
        self.effective_drift() + self.signed_jump_mean()
    }

    /// Remove jumps with |z| ≤ δ. With `compensate` set the retained jumps
    /// are kept (or placed) in compensated form, so the effective drift
    /// shifts by −∫z 1{|z|>δ} λ(dz) relative to an uncompensated spec.
    pub fn truncate(&self, delta: f64, compensate: bool) -> Result<LevyNoiseSpec, NoiseError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(NoiseError::Invalid(format!("truncation delta must be positive, got {delta}")));
        }
        let mut out = self.clone();
        out.delta_sim = self.delta_sim.max(delta);
        out.jumps_compensated = self.jumps_compensated || compensate;
        // drop components with no remaining mass
        out.jumps.retain(|j| j.mass_above(out.delta_sim) > 0.0);
        Ok(out)
    }
}

/// One jump event inside a sampled box.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    /// Event time within the box interval.
    pub t: f64,
    /// Position as fractional offsets in [0,1)^d of the spatial cell.
    pub x: Vec<f64>,
    /// Jump size.
    pub z: f64,
}

/// Realization of the noise restricted to one space-time box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRealization {
    pub jumps: Vec<JumpEvent>,
    /// Gaussian increment ρ·W(box) ~ N(0, ρ²·volume).
    pub gaussian: f64,
    /// Effective drift mass b_eff·volume.
    pub drift: f64,
}

impl BoxRealization {
    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty() && self.gaussian == 0.0 && self.drift == 0.0
    }
}

/// Sample the noise in a box (t0,t1) × cell of the given spatial volume.
pub fn sample_box<G: Rng>(
    spec: &LevyNoiseSpec,
    t0: f64,
    t1: f64,
    cell_volume: f64,
    dim: u32,
    rng: &mut G,
) -> Result<BoxRealization, NoiseError> {
    if !(t1 > t0) || !(cell_volume > 0.0) {
        return Err(NoiseError::Invalid(format!(
            "box must have positive volume: t0={t0}, t1={t1}, cell_volume={cell_volume}"
        )));
    }
    let volume = (t1 - t0) * cell_volume;
    let rates: Vec<f64> = spec.jumps.iter().map(|j| j.mass_above(spec.delta_sim)).collect();
    let total_rate: f64 = rates.iter().sum();
    let mut jumps = Vec::new();
    if total_rate > 0.0 {
        let mean = total_rate * volume;
        let count = Poisson::new(mean)
            .map_err(|e| NoiseError::Invalid(format!("invalid Poisson mean {mean}: {e}")))?
            .sample(rng) as u64;
        for _ in 0..count {
            let t = t0 + rng.gen::<f64>() * (t1 - t0);
            let x = (0..dim).map(|_| rng.gen::<f64>()).collect();
            // pick the component proportionally to retained rate
            let mut pick = rng.gen::<f64>() * total_rate;
            let mut idx = 0;
            for (i, &r) in rates.iter().enumerate() {
                idx = i;
                if pick < r {
                    break;
                }
                pick -= r;
            }
            let z = spec.jumps[idx].sample_above(spec.delta_sim, rng);
            jumps.push(JumpEvent { t, x, z });
        }
        jumps.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite times"));
    }
    let gaussian = if spec.gaussian != 0.0 {
        let n: f64 = StandardNormal.sample(rng);
        spec.gaussian * volume.sqrt() * n
    } else {
        0.0
    };
    Ok(BoxRealization { jumps, gaussian, drift: spec.effective_drift() * volume })
}
