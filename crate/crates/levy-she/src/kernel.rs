//! Heat-kernel evaluation and closed-form kernel integrals.
//!
//! Everything here concerns g(t,x) = (2πκt)^{−d/2} exp(−|x|²/(2κt)) and
//! its p-th power integrated over super-level sets {g > ε}, possibly with
//! exponential weights in time and space. Closed forms are paired with
//! quadrature oracles in the tests.

use std::collections::HashMap;
use std::sync::RwLock;

use once_cell::sync::Lazy;

use crate::error::KernelError;
use crate::quad::{self, QuadTol};
use crate::scalar::Real;
use crate::special;

/// Diffusion constant and spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<R> {
    pub kappa: R,
    pub d: u32,
}

impl<R: Real> KernelParams<R> {
    pub fn new(kappa: R, d: u32) -> Result<Self, KernelError> {
        if !(kappa > R::zero()) || !kappa.is_finite() {
            return Err(KernelError::Domain(format!(
                "kappa must be positive and finite, got {:?}",
                kappa
            )));
        }
        if !(1..=3).contains(&d) {
            return Err(KernelError::Domain(format!("dimension must be 1, 2 or 3, got {d}")));
        }
        Ok(KernelParams { kappa, d })
    }

    /// Dimension as a scalar.
    pub fn df(&self) -> R {
        R::of(self.d as f64)
    }

    /// Critical moment order 1 + 2/d above which time-space integrals of
    /// g^p diverge.
    pub fn critical_order(&self) -> R {
        R::one() + R::of(2.0) / self.df()
    }

    fn check_subcritical(&self, p: R) -> Result<(), KernelError> {
        if p >= self.critical_order() {
            Err(KernelError::Divergent(format!(
                "p = {:?} is at or above the critical order 1 + 2/d = {:?}",
                p,
                self.critical_order()
            )))
        } else {
            Ok(())
        }
    }
}

/// Parameters of an exponentially weighted kernel integral
/// ∫∫ g^p(t,x) e^{−pβt + pc|x|} dt dx over the level set {g > ε}.
#[derive(Debug, Clone, Copy)]
pub struct WeightedKernelQuery<R> {
    pub p: R,
    pub c: R,
    pub beta: R,
    pub epsilon: R,
}

/// g(t,x) = (2πκt)^{−d/2} exp(−|x|²/(2κt)).
pub fn heat_kernel<R: Real>(params: &KernelParams<R>, t: R, x: &[R]) -> Result<R, KernelError> {
    if !(t > R::zero()) {
        return Err(KernelError::Domain(format!("heat kernel needs t > 0, got {:?}", t)));
    }
    if x.len() != params.d as usize {
        return Err(KernelError::Domain(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            params.d
        )));
    }
    let r2 = x.iter().fold(R::zero(), |acc, &xi| acc + xi * xi);
    let two = R::of(2.0);
    let var = two * params.kappa * t;
    let norm = (R::PI() * var).powf(params.df() / two);
    Ok((-r2 / var).exp() / norm)
}

/// Radial form of g at distance r from the origin.
pub fn heat_kernel_radial<R: Real>(params: &KernelParams<R>, t: R, r: R) -> R {
    let two = R::of(2.0);
    let var = two * params.kappa * t;
    (-r * r / var).exp() / (R::PI() * var).powf(params.df() / two)
}

/// Surface area of the unit sphere in R^d: 2π^{d/2}/Γ(d/2).
pub fn sphere_area<R: Real>(d: u32) -> R {
    let half_d = R::of(d as f64 / 2.0);
    R::of(2.0) * R::PI().powf(half_d) / special::gamma(half_d)
}

/// Time extent of the super-level set {g > ε}: g(t,0) > ε iff t < 1/(2πκ ε^{2/d}).
pub fn level_set_horizon<R: Real>(params: &KernelParams<R>, epsilon: R) -> R {
    let two = R::of(2.0);
    (two * R::PI() * params.kappa * epsilon.powf(two / params.df())).recip()
}

/// Radius of the spatial slice {x : g(t,x) > ε}; zero outside the time support.
pub fn level_set_radius<R: Real>(params: &KernelParams<R>, epsilon: R, t: R) -> R {
    let two = R::of(2.0);
    let arg = epsilon * (two * R::PI() * params.kappa * t).powf(params.df() / two);
    if arg >= R::one() {
        return R::zero();
    }
    (-two * params.kappa * t * arg.ln()).sqrt()
}

/// Closed-form upper bound for ∫₀^∞∫ g^p(t,x) e^{−pβt+pc|x|} dt dx
/// (valid for 0 < p < 1+2/d, c ≥ 0, β > κc²d/2):
///
/// 2^{d(3−p)/2} Γ(1−d(p−1)/2) /
///   [ p^{1+d(1−p/2)} (πκ)^{d(p−1)/2} (β−κc²d/2)^{1−d(p−1)/2} ].
pub fn weighted_kernel_integral_bound<R: Real>(
    params: &KernelParams<R>,
    q: &WeightedKernelQuery<R>,
) -> Result<R, KernelError> {
    let WeightedKernelQuery { p, c, beta, .. } = *q;
    let d = params.df();
    let one = R::one();
    let two = R::of(2.0);
    if !(p > R::zero()) {
        return Err(KernelError::Domain(format!("order must be positive, got {:?}", p)));
    }
    params.check_subcritical(p)?;
    if c < R::zero() {
        return Err(KernelError::Domain(format!("spatial weight c must be >= 0, got {:?}", c)));
    }
    let margin = beta - params.kappa * c * c * d / two;
    if !(margin > R::zero()) {
        return Err(KernelError::Domain(format!(
            "beta must exceed kappa*c^2*d/2 = {:?}, got beta = {:?}",
            params.kappa * c * c * d / two,
            beta
        )));
    }
    let half_excess = one - d * (p - one) / two; // 1 − d(p−1)/2 ∈ (0, 1]
    let numer = two.powf(d * (R::of(3.0) - p) / two) * special::gamma(half_excess);
    let denom = p.powf(one + d * (one - p / two))
        * (R::PI() * params.kappa).powf(d * (p - one) / two)
        * margin.powf(half_excess);
    Ok(numer / denom)
}

static CP_CACHE: Lazy<RwLock<HashMap<(u32, u64), f64>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// Dimensionless constant C_p with
/// ∫₀^∞∫ g^p 1{g>ε} dt dx = C_p / (κ ε^{1+2/d−p}), i.e.
///
/// C_p = (d/2)^{d/2}/(π Γ(d/2)) ∫₀¹∫₀¹ s^{pd(z²−1)/2} (−s log s)^{d/2} z^{d−1} dz ds.
///
/// The s-integral is Γ(d/2+1)/(1+d/2+pd(z²−1)/2)^{d/2+1} exactly, leaving a
/// smooth one-dimensional quadrature in z; values are cached per (d, p).
pub fn level_set_constant<R: Real>(params: &KernelParams<R>, p: R) -> Result<R, KernelError> {
    if p < R::zero() {
        return Err(KernelError::Domain(format!("order must be >= 0, got {:?}", p)));
    }
    params.check_subcritical(p)?;
    let d = params.d;
    let pf = p.to_f64_lossy();
    let key = (d, pf.to_bits());
    if let Some(&v) = CP_CACHE.read().expect("cache lock").get(&key) {
        return Ok(R::of(v));
    }
    let df = d as f64;
    let half_d = df / 2.0;
    let power = half_d + 1.0;
    let zint = quad::integrate(
        |z: f64| z.powi(d as i32 - 1) / (1.0 + half_d + pf * df * (z * z - 1.0) / 2.0).powf(power),
        0.0,
        1.0,
        QuadTol::new(1e-12, 1e-10),
    );
    let value = half_d.powf(half_d) * special::gamma(power) / (std::f64::consts::PI
        * special::gamma(half_d))
        * zint;
    CP_CACHE.write().expect("cache lock").insert(key, value);
    Ok(R::of(value))
}

/// ∫₀^∞∫ g^p(t,x) 1{g(t,x)>ε} dt dx = C_p / (κ ε^{1+2/d−p}).
pub fn truncated_p_integral<R: Real>(
    params: &KernelParams<R>,
    p: R,
    epsilon: R,
) -> Result<R, KernelError> {
    if !(epsilon > R::zero()) {
        return Err(KernelError::Domain(format!("epsilon must be positive, got {:?}", epsilon)));
    }
    let cp = level_set_constant(params, p)?;
    let exponent = params.critical_order() - p;
    Ok(cp / (params.kappa * epsilon.powf(exponent)))
}

/// Space-time volume of the super-level set {g > ε}: the p = 0 case of
/// [`truncated_p_integral`].
pub fn super_level_volume<R: Real>(params: &KernelParams<R>, epsilon: R) -> Result<R, KernelError> {
    truncated_p_integral(params, R::zero(), epsilon)
}

/// Spatial slice ∫ g^p(t,x) 1{g(t,x)>ε} dx at a fixed time:
///
/// [p^{d/2} Γ(d/2) (2πκt)^{d(p−1)/2}]^{−1} · γ(d/2, −p log(ε(2πκt)^{d/2})),
///
/// zero outside the support t < (2πκ ε^{2/d})^{−1}.
pub fn slice_p_integral<R: Real>(
    params: &KernelParams<R>,
    p: R,
    epsilon: R,
    t: R,
) -> Result<R, KernelError> {
    if !(t > R::zero()) {
        return Err(KernelError::Domain(format!("slice integral needs t > 0, got {:?}", t)));
    }
    if !(epsilon > R::zero()) {
        return Err(KernelError::Domain(format!("epsilon must be positive, got {:?}", epsilon)));
    }
    let one = R::one();
    let two = R::of(2.0);
    let d = params.df();
    let arg = epsilon * (two * R::PI() * params.kappa * t).powf(d / two);
    if arg >= one {
        return Ok(R::zero());
    }
    let half_d = d / two;
    let gamma_arg = -p * arg.ln();
    let prefactor = p.powf(half_d)
        * special::gamma(half_d)
        * (two * R::PI() * params.kappa * t).powf(d * (p - one) / two);
    Ok(special::incomplete_gamma_lower(half_d, gamma_arg) / prefactor)
}

/// Spatial slice ∫ g^p(κ;t,x) 1{g(1;t,x)>ε} dx with the level set taken at
/// unit diffusion (κ-independent support):
///
/// [p^{d/2} Γ(d/2) (2πκt)^{d(p−1)/2}]^{−1} · γ(d/2, −(p/κ)·log(ε(2πt)^{d/2})),
///
/// zero outside t < (2πε^{2/d})^{−1}.
pub fn slice_p_integral_unit_level<R: Real>(
    params: &KernelParams<R>,
    p: R,
    epsilon: R,
    t: R,
) -> Result<R, KernelError> {
    if !(t > R::zero()) {
        return Err(KernelError::Domain(format!("slice integral needs t > 0, got {:?}", t)));
    }
    if !(epsilon > R::zero()) {
        return Err(KernelError::Domain(format!("epsilon must be positive, got {:?}", epsilon)));
    }
    let one = R::one();
    let two = R::of(2.0);
    let d = params.df();
    let arg = epsilon * (two * R::PI() * t).powf(d / two);
    if arg >= one {
        return Ok(R::zero());
    }
    let half_d = d / two;
    let gamma_arg = -p / params.kappa * arg.ln();
    let prefactor = p.powf(half_d)
        * special::gamma(half_d)
        * (two * R::PI() * params.kappa * t).powf(d * (p - one) / two);
    Ok(special::incomplete_gamma_lower(half_d, gamma_arg) / prefactor)
}

/// Result of an exponentially time-weighted level-set integral.
#[derive(Debug, Clone, Copy)]
pub struct ExpWeightedIntegral<R> {
    /// Quadrature value of ∫₀^∞ e^{−βt} ∫ g^p 1{g>ε} dx dt.
    pub value: R,
    /// Closed-form lower bound
    /// γ(d/2,1)·γ(1−d(p−1)/2, 1) / [p^{d/2} Γ(d/2) (2πκ)^{d(p−1)/2} β^{1−d(p−1)/2}],
    /// available when β ≥ 2πκ e^{2/(pd)} ε^{2/d}.
    pub lower_bound: Option<R>,
}

/// ∫₀^∞ e^{−βt} · slice_p_integral(t) dt with its closed-form lower bound.
pub fn exp_weighted_truncated_integral<R: Real>(
    params: &KernelParams<R>,
    p: R,
    epsilon: R,
    beta: R,
) -> Result<ExpWeightedIntegral<R>, KernelError> {
    if beta < R::zero() {
        return Err(KernelError::Domain(format!("beta must be >= 0, got {:?}", beta)));
    }
    if !(epsilon > R::zero()) {
        return Err(KernelError::Domain(format!("epsilon must be positive, got {:?}", epsilon)));
    }
    params.check_subcritical(p)?;
    let one = R::one();
    let two = R::of(2.0);
    let d = params.df();
    let horizon = level_set_horizon(params, epsilon);
    let value = quad::integrate(
        |t: R| {
            if t <= R::zero() {
                return R::zero();
            }
            (-beta * t).exp() * slice_p_integral(params, p, epsilon, t).unwrap_or(R::zero())
        },
        R::zero(),
        horizon,
        QuadTol::default(),
    );
    let threshold = two * R::PI() * params.kappa * (two / (p * d)).exp() * epsilon.powf(two / d);
    let lower_bound = if beta >= threshold && p >= one {
        let half_d = d / two;
        let half_excess = one - d * (p - one) / two;
        let numer = special::incomplete_gamma_lower(half_d, one)
            * special::incomplete_gamma_lower(half_excess, one);
        let denom = p.powf(half_d)
            * special::gamma(half_d)
            * (two * R::PI() * params.kappa).powf(d * (p - one) / two)
            * beta.powf(half_excess);
        Some(numer / denom)
    } else {
        None
    };
    Ok(ExpWeightedIntegral { value, lower_bound })
}

/// Closed-form lower bound for the outward cone integral
/// ∫₀^∞ ∫_{|x| ≥ α̃t} g^p 1{g>ε} dx dt, valid when α̃² ε^{−2/d} ≥ 2πκ²:
///
/// 2(2κ)^{1−d(p−1)} α̃^{−2(1−d(p−1)/2)} γ(1+d(1−p/2), 1/6)
///   / [d Γ(d/2) π^{d(p−1)/2} p^{1+d(1−p/2)} (1+2/d−p)].
pub fn front_integral_lower_bound<R: Real>(
    params: &KernelParams<R>,
    p: R,
    epsilon: R,
    alpha_tilde: R,
) -> Result<R, KernelError> {
    let one = R::one();
    let two = R::of(2.0);
    let d = params.df();
    if !(alpha_tilde > R::zero()) || !(epsilon > R::zero()) {
        return Err(KernelError::Domain(
            "front bound needs alpha_tilde > 0 and epsilon > 0".into(),
        ));
    }
    params.check_subcritical(p)?;
    let ratio = alpha_tilde * alpha_tilde * epsilon.powf(-two / d);
    let floor = two * R::PI() * params.kappa * params.kappa;
    if ratio < floor {
        return Err(KernelError::Domain(format!(
            "requires alpha_tilde^2 * epsilon^(-2/d) >= 2*pi*kappa^2 ({:?} < {:?})",
            ratio, floor
        )));
    }
    let half_d = d / two;
    let dp1 = d * (p - one); // d(p−1)
    let numer = two
        * (two * params.kappa).powf(one - dp1)
        * alpha_tilde.powf(-two * (one - dp1 / two))
        * special::incomplete_gamma_lower(one + d * (one - p / two), R::of(1.0 / 6.0));
    let denom = d
        * special::gamma(half_d)
        * R::PI().powf(dp1 / two)
        * p.powf(one + d * (one - p / two))
        * (params.critical_order() - p);
    Ok(numer / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn kp(kappa: f64, d: u32) -> KernelParams<f64> {
        KernelParams::new(kappa, d).unwrap()
    }

    /// Quadrature oracle for ∫₀^∞∫ g^p 1{g>ε} e^{−βt} dt dx by nesting a
    /// radial slice quadrature inside a time quadrature. Independent of the
    /// closed forms (only uses the level-set radius definition).
    fn level_set_oracle(params: &KernelParams<f64>, p: f64, epsilon: f64, beta: f64) -> f64 {
        let horizon = level_set_horizon(params, epsilon);
        let area = sphere_area::<f64>(params.d);
        quad::integrate(
            |t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let rmax = level_set_radius(params, epsilon, t);
                if rmax == 0.0 {
                    return 0.0;
                }
                let slice = quad::integrate(
                    |r: f64| {
                        heat_kernel_radial(params, t, r).powf(p) * r.powi(params.d as i32 - 1)
                    },
                    0.0,
                    rmax,
                    QuadTol::new(1e-13, 1e-9),
                );
                area * slice * (-beta * t).exp()
            },
            0.0,
            horizon,
            QuadTol::new(1e-12, 1e-7),
        )
    }

    #[test]
    fn heat_kernel_values() {
        // normalizing constant equals 1 at t = 1/(2π)
        let v = heat_kernel(&kp(1.0, 1), 1.0 / (2.0 * std::f64::consts::PI), &[0.0]).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
        // d=2 at the origin
        let v = heat_kernel(&kp(1.0, 2), 0.7, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(v, 1.0 / (2.0 * std::f64::consts::PI * 0.7), max_relative = 1e-14);
        // high-precision reference: (π)^{−1/2} e^{−1} for κ=0.5, t=1, x=1
        let v = heat_kernel(&kp(0.5, 1), 1.0, &[1.0]).unwrap();
        assert_relative_eq!(v, 0.207_553_748_710_297_35, max_relative = 1e-14);
        // mass normalization: ∫ g dx = 1 (d=1)
        let p = kp(0.3, 1);
        let mass = quad::integrate_to_inf(
            |x: f64| heat_kernel(&p, 0.8, &[x]).unwrap(),
            0.0,
            QuadTol::default(),
        ) * 2.0;
        assert_relative_eq!(mass, 1.0, max_relative = 1e-9);
        assert!(heat_kernel(&kp(1.0, 1), 0.0, &[0.0]).is_err());
        assert!(heat_kernel(&kp(1.0, 2), 1.0, &[0.0]).is_err());
    }

    #[test]
    fn weighted_bound_reduces_to_two_over_beta() {
        let q = WeightedKernelQuery { p: 1.0, c: 0.0, beta: 2.0, epsilon: 0.0 };
        let v = weighted_kernel_integral_bound(&kp(1.0, 1), &q).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn weighted_bound_dominates_quadrature_and_c0_ratio_is_2_pow_d() {
        for &(d, p, c, beta, kappa) in &[
            (1u32, 1.0, 0.0, 2.0, 1.0),
            (1, 1.5, 0.3, 1.0, 0.5),
            (1, 2.5, 0.0, 3.0, 2.0),
            (2, 1.5, 0.1, 1.0, 1.0),
            (2, 1.2, 0.0, 0.7, 0.25),
        ] {
            let params = kp(kappa, d);
            let q = WeightedKernelQuery { p, c, beta, epsilon: 0.0 };
            let bound = weighted_kernel_integral_bound(&params, &q).unwrap();
            // oracle: ∫₀^∞ e^{−pβt} ∫ g^p e^{pc|x|} dx dt with the radial
            // x-integral done numerically
            let area = sphere_area::<f64>(d);
            let exact = quad::integrate_to_inf(
                |t: f64| {
                    if t <= 0.0 {
                        return 0.0;
                    }
                    // the integrand peaks at r = κtc with width √(κt/p);
                    // a scaled finite range keeps the spike resolvable
                    let rmax = kappa * t * c + 15.0 * (kappa * t / p).sqrt();
                    let radial = quad::integrate(
                        |r: f64| {
                            heat_kernel_radial(&params, t, r).powf(p)
                                * (p * c * r).exp()
                                * r.powi(d as i32 - 1)
                        },
                        0.0,
                        rmax,
                        QuadTol::new(1e-13, 1e-9),
                    );
                    area * radial * (-p * beta * t).exp()
                },
                0.0,
                QuadTol::new(1e-12, 1e-8),
            );
            assert!(
                bound >= exact * (1.0 - 1e-6),
                "bound {bound} should dominate oracle {exact} at d={d} p={p} c={c}"
            );
            if c == 0.0 {
                assert_relative_eq!(bound / exact, 2f64.powi(d as i32), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn weighted_bound_domain_errors() {
        let params = kp(1.0, 1);
        // p at the critical order
        let q = WeightedKernelQuery { p: 3.0, c: 0.0, beta: 5.0, epsilon: 0.0 };
        assert!(matches!(
            weighted_kernel_integral_bound(&params, &q),
            Err(KernelError::Divergent(_))
        ));
        // beta below the threshold
        let q = WeightedKernelQuery { p: 1.5, c: 2.0, beta: 1.0, epsilon: 0.0 };
        assert!(matches!(weighted_kernel_integral_bound(&params, &q), Err(KernelError::Domain(_))));
    }

    #[test]
    fn truncated_integral_matches_2d_quadrature() {
        for &(d, kappa, p, eps) in &[
            (1u32, 1.0, 2.0, 0.1),
            (1, 0.5, 1.5, 0.05),
            (1, 1.0, 0.0, 0.1),
            (2, 1.0, 1.5, 0.2),
            (2, 2.0, 0.5, 0.05),
        ] {
            let params = kp(kappa, d);
            let closed = truncated_p_integral(&params, p, eps).unwrap();
            let oracle = level_set_oracle(&params, p, eps, 0.0);
            assert_relative_eq!(closed, oracle, max_relative = 1e-4);
        }
    }

    #[test]
    fn truncated_integral_scaling_and_divergence() {
        let params = kp(1.0, 1);
        let p = 1.5;
        // ε-scaling slope forced by the closed form
        let v1 = truncated_p_integral(&params, p, 0.1).unwrap();
        let v2 = truncated_p_integral(&params, p, 0.2).unwrap();
        let slope = (v2.ln() - v1.ln()) / (0.2f64.ln() - 0.1f64.ln());
        assert_relative_eq!(slope, -(1.0 + 2.0 - p), max_relative = 1e-10);
        // κ-scaling
        let v1 = super_level_volume(&kp(1.0, 1), 0.1).unwrap();
        let v2 = super_level_volume(&kp(2.0, 1), 0.1).unwrap();
        assert_relative_eq!(v1 / v2, 2.0, max_relative = 1e-10);
        // ε-scaling of the level-set volume
        let v2 = super_level_volume(&kp(1.0, 1), 0.2).unwrap();
        assert_relative_eq!(v1 / v2, 2f64.powf(3.0), max_relative = 1e-10);
        // monotone blow-up toward the critical order (ε close enough to 1
        // that the Γ-factor dominates the shrinking ε-power from the start)
        let mut prev = 0.0;
        for i in 0..20 {
            let p = 2.5 + 0.024 * i as f64;
            let v = truncated_p_integral(&params, p, 0.5).unwrap();
            assert!(v > prev, "blow-up must be monotone at p = {p}");
            prev = v;
        }
        assert!(matches!(
            truncated_p_integral(&params, 3.0, 0.1),
            Err(KernelError::Divergent(_))
        ));
    }

    #[test]
    fn slice_integral_matches_radial_quadrature() {
        for &(d, kappa, p, eps, t) in &[
            (1u32, 1.0, 1.5, 0.05, 0.01),
            (1, 0.5, 2.0, 0.1, 0.3),
            (2, 1.0, 1.2, 0.02, 0.5),
        ] {
            let params = kp(kappa, d);
            let closed = slice_p_integral(&params, p, eps, t).unwrap();
            let rmax = level_set_radius(&params, eps, t);
            let oracle = sphere_area::<f64>(d)
                * quad::integrate(
                    |r: f64| {
                        heat_kernel_radial(&params, t, r).powf(p) * r.powi(d as i32 - 1)
                    },
                    0.0,
                    rmax,
                    QuadTol::default(),
                );
            assert_relative_eq!(closed, oracle, max_relative = 1e-7);
        }
    }

    #[test]
    fn slice_integral_support() {
        let params = kp(1.0, 1);
        let eps = 0.05;
        let horizon = level_set_horizon(&params, eps);
        // vanishes at and beyond the support edge
        assert_eq!(slice_p_integral(&params, 1.5, eps, horizon).unwrap(), 0.0);
        assert_eq!(slice_p_integral(&params, 1.5, eps, 2.0 * horizon).unwrap(), 0.0);
        // shrinks to zero approaching the edge from below
        let near = slice_p_integral(&params, 1.5, eps, horizon * (1.0 - 1e-9)).unwrap();
        assert!(near < 1e-3);
        // time integral of slices reproduces the closed-form space-time integral
        let total = quad::integrate(
            |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    slice_p_integral(&params, 1.5, eps, t).unwrap()
                }
            },
            0.0,
            horizon,
            QuadTol::new(1e-12, 1e-8),
        );
        let closed = truncated_p_integral(&params, 1.5, eps).unwrap();
        assert_relative_eq!(total, closed, max_relative = 1e-6);
    }

    #[test]
    fn unit_level_slice_matches_radial_quadrature() {
        for &(d, kappa, p, eps, t) in &[
            (1u32, 0.5, 1.5, 0.05, 0.3),
            (1, 2.0, 2.0, 0.1, 0.2),
            (2, 0.25, 1.3, 0.02, 0.6),
        ] {
            let params = kp(kappa, d);
            let closed = slice_p_integral_unit_level(&params, p, eps, t).unwrap();
            // level-set radius at unit diffusion
            let unit = kp(1.0, d);
            let rmax = level_set_radius(&unit, eps, t);
            assert!(rmax > 0.0);
            let oracle = sphere_area::<f64>(d)
                * quad::integrate(
                    |r: f64| {
                        heat_kernel_radial(&params, t, r).powf(p) * r.powi(d as i32 - 1)
                    },
                    0.0,
                    rmax,
                    QuadTol::default(),
                );
            assert_relative_eq!(closed, oracle, max_relative = 1e-7);
        }
        // support is κ-independent
        let params = kp(5.0, 1);
        let horizon = 1.0 / (2.0 * std::f64::consts::PI * 0.05f64.powf(2.0));
        assert_eq!(slice_p_integral_unit_level(&params, 1.5, 0.05, horizon * 1.01).unwrap(), 0.0);
        assert!(slice_p_integral_unit_level(&params, 1.5, 0.05, horizon * 0.9).unwrap() > 0.0);
    }

    #[test]
    fn exp_weighted_integral_properties() {
        let params = kp(1.0, 1);
        let (p, eps) = (1.5, 0.05);
        // β = 0 reduces to the unweighted integral
        let at0 = exp_weighted_truncated_integral(&params, p, eps, 0.0).unwrap();
        let closed = truncated_p_integral(&params, p, eps).unwrap();
        assert_relative_eq!(at0.value, closed, max_relative = 1e-6);
        // monotone decreasing in β and dominated lower bound when available
        let mut prev = f64::INFINITY;
        for &beta in &[0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
            let r = exp_weighted_truncated_integral(&params, p, eps, beta).unwrap();
            assert!(r.value < prev);
            prev = r.value;
            if let Some(lb) = r.lower_bound {
                assert!(
                    r.value >= lb * (1.0 - 1e-7),
                    "quadrature {v} must dominate closed-form lower bound {lb} at beta={beta}",
                    v = r.value
                );
            }
        }
        // threshold activation: large β always carries the bound
        let threshold =
            2.0 * std::f64::consts::PI * (2.0 / p).exp() * 0.05f64.powf(2.0);
        assert!(exp_weighted_truncated_integral(&params, p, eps, threshold * 1.01)
            .unwrap()
            .lower_bound
            .is_some());
        assert!(exp_weighted_truncated_integral(&params, p, eps, threshold * 0.5)
            .unwrap()
            .lower_bound
            .is_none());
    }

    #[test]
    fn front_bound_is_dominated_by_cone_quadrature() {
        // oracle: ∫₀^∞ ∫_{α̃t ≤ |x| ≤ rmax(t)} g^p dx dt
        for &(d, kappa, p, eps) in &[(1u32, 0.4, 1.5, 0.1f64), (2, 0.3, 1.3, 0.2)] {
            let params = kp(kappa, d);
            let floor = (2.0 * std::f64::consts::PI * kappa * kappa
                * eps.powf(2.0 / d as f64))
            .sqrt();
            let alpha_tilde = 1.5 * floor;
            let bound = front_integral_lower_bound(&params, p, eps, alpha_tilde).unwrap();
            let horizon = level_set_horizon(&params, eps);
            let area = sphere_area::<f64>(d);
            let oracle = quad::integrate(
                |t: f64| {
                    if t <= 0.0 {
                        return 0.0;
                    }
                    let rmax = level_set_radius(&params, eps, t);
                    let rmin = alpha_tilde * t;
                    if rmin >= rmax {
                        return 0.0;
                    }
                    area * quad::integrate(
                        |r: f64| {
                            heat_kernel_radial(&params, t, r).powf(p) * r.powi(d as i32 - 1)
                        },
                        rmin,
                        rmax,
                        QuadTol::new(1e-13, 1e-9),
                    )
                },
                0.0,
                horizon,
                QuadTol::new(1e-12, 1e-7),
            );
            assert!(
                oracle >= bound,
                "cone integral {oracle} must dominate closed-form bound {bound} (d={d})"
            );
            assert!(bound > 0.0);
        }
    }

    #[test]
    fn front_bound_blowup_and_kappa_scaling() {
        // blow-up as p → 1+2/d
        let params = kp(0.2, 1);
        let eps = 0.1;
        let alpha_tilde = 10.0;
        let mut prev = 0.0;
        for i in 0..10 {
            let p = 2.8 + 0.019 * i as f64;
            let v = front_integral_lower_bound(&params, p, eps, alpha_tilde).unwrap();
            assert!(v > prev);
            prev = v;
        }
        // d=1, α̃ = √(2π)·κ·ε: bound scales as κ^{−1}
        let p = 1.5;
        let eps = 0.3;
        let mut logs = Vec::new();
        for &kappa in &[0.05, 0.1, 0.2, 0.4] {
            // nudged above √(2π)κε so the precondition holds despite rounding
            let at = (2.0 * std::f64::consts::PI).sqrt() * kappa * eps * (1.0 + 1e-9);
            let v = front_integral_lower_bound(&kp(kappa, 1), p, eps, at).unwrap();
            logs.push((kappa.ln(), v.ln()));
        }
        for w in logs.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope + 1.0).abs() < 0.02, "kappa slope {slope} should be -1");
        }
        // precondition violation reported by name
        let err = front_integral_lower_bound(&kp(5.0, 1), 1.5, 0.3, 0.01).unwrap_err();
        match err {
            KernelError::Domain(msg) => assert!(msg.contains("2*pi*kappa^2")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(0.0, 1).is_err());
        assert!(KernelParams::new(1.0, 0).is_err());
        assert!(KernelParams::new(1.0, 4).is_err());
        assert!(KernelParams::new(f64::NAN, 1).is_err());
    }
}
