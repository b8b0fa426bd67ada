//! Numerical checks of the standalone probabilistic inequalities on
//! exactly computable or brute-force-checkable instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::IneqError;
use crate::kernel::KernelParams;
use crate::quad::{self, QuadTol};
use crate::special;

/// How a case was evaluated, with the error band the verdict honours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    ExactSeries,
    Quadrature,
    Enumeration,
    MonteCarlo { se: f64 },
}

impl Method {
    fn band(&self) -> f64 {
        match *self {
            Method::ExactSeries | Method::Enumeration => 0.0,
            Method::Quadrature => 1e-7,
            Method::MonteCarlo { se } => 3.0 * se,
        }
    }
}

/// One verified inequality instance; the claimed direction is LHS ≥ RHS.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IneqCase {
    pub id: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// LHS − RHS.
    pub margin: f64,
    pub method: Method,
}

impl IneqCase {
    fn new(id: &str, instance: String, lhs: f64, rhs: f64, method: Method) -> IneqCase {
        IneqCase { id: id.to_string(), instance, lhs, rhs, margin: lhs - rhs, method }
    }

    /// Does the margin respect the direction up to the method band?
    pub fn holds(&self) -> bool {
        self.margin >= -self.method.band() * (1.0 + self.lhs.abs() + self.rhs.abs())
    }
}

/// Exact E[X^r] for X ~ Poisson(λ), series truncated below 1e−12 tail.
pub fn poisson_moment(lambda: f64, r: f64) -> f64 {
    let mut term = (-lambda).exp(); // P[X = 0]
    let mut total = 0.0; // 0^r = 0 for r > 0
    let mut k = 0u64;
    loop {
        k += 1;
        term *= lambda / k as f64;
        total += (k as f64).powf(r) * term;
        // remaining mass bound: the Poisson tail decays faster than a
        // geometric once k > 2λ; stop when the next term is negligible
        if k as f64 > 2.0 * lambda + 20.0 && (k as f64).powf(r) * term < 1e-14 * (1.0 + total) {
            break;
        }
        if k > 10_000_000 {
            break;
        }
    }
    total
}

/// E[X^r] ≥ e^{−1}·λ^r for λ > 1 and ≥ e^{−1}·λ for λ ≤ 1 (the floor
/// follows from P[X=1] = λe^{−λ} ≥ λe^{−1} on λ ≤ 1 and Jensen/LLN above).
pub fn poisson_moment_check(lambda: f64, r: f64) -> Result<IneqCase, IneqError> {
    if !(lambda > 0.0 && r > 0.0) {
        return Err(IneqError::Invalid(format!("need lambda > 0 and r > 0, got {lambda}, {r}")));
    }
    let lhs = poisson_moment(lambda, r);
    let floor = (-1f64).exp();
    let rhs = if lambda > 1.0 { floor * lambda.powf(r) } else { floor * lambda };
    Ok(IneqCase::new(
        "poisson_moment",
        format!("lambda={lambda}, r={r}"),
        lhs,
        rhs,
        Method::ExactSeries,
    ))
}

/// Full suite over a (λ, r) grid; also reports the empirical best constant
/// min over cases of E[X^r]/(λ^r ∨ λ-normalizer).
pub fn poisson_moment_suite(
    lambdas: &[f64],
    rs: &[f64],
) -> Result<(Vec<IneqCase>, f64), IneqError> {
    let mut cases = Vec::new();
    let mut best = f64::INFINITY;
    for &l in lambdas {
        for &r in rs {
            let case = poisson_moment_check(l, r)?;
            let norm = if l > 1.0 { l.powf(r) } else { l };
            best = best.min(case.lhs / norm);
            cases.push(case);
        }
    }
    Ok((cases, best))
}

/// Built-in zero-mean distributions for the split-moment check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CenteredFamily {
    /// X = ±size with probability ½ each.
    SymmetricTwoPoint { size: f64 },
    /// X = N − λ, N ~ Poisson(λ).
    CenteredPoisson { lambda: f64 },
    /// X = E − scale, E ~ Exp(mean = scale).
    CenteredExponential { scale: f64 },
}

impl CenteredFamily {
    fn validate(&self) -> Result<(), IneqError> {
        let ok = match *self {
            CenteredFamily::SymmetricTwoPoint { size } => size > 0.0,
            CenteredFamily::CenteredPoisson { lambda } => lambda > 0.0,
            CenteredFamily::CenteredExponential { scale } => scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(IneqError::Invalid(format!("invalid family parameters: {self:?}")))
        }
    }

    /// E|a + X|^p by exact series or quadrature.
    fn abs_moment_shifted(&self, a: f64, p: f64) -> (f64, Method) {
        match *self {
            CenteredFamily::SymmetricTwoPoint { size } => {
                (0.5 * ((a + size).abs().powf(p) + (a - size).abs().powf(p)), Method::ExactSeries)
            }
            CenteredFamily::CenteredPoisson { lambda } => {
                let mut term = (-lambda).exp();
                let mut total = term * (a - lambda).abs().powf(p);
                let mut k = 0u64;
                loop {
                    k += 1;
                    term *= lambda / k as f64;
                    let x = a + k as f64 - lambda;
                    total += x.abs().powf(p) * term;
                    if k as f64 > 2.0 * lambda + 20.0
                        && x.abs().powf(p) * term < 1e-14 * (1.0 + total)
                    {
                        break;
                    }
                }
                (total, Method::ExactSeries)
            }
            CenteredFamily::CenteredExponential { scale } => {
                let v = quad::integrate_to_inf(
                    |e: f64| (a + e - scale).abs().powf(p) * (-e / scale).exp() / scale,
                    0.0,
                    QuadTol::new(1e-12, 1e-10),
                );
                (v, Method::Quadrature)
            }
        }
    }

    fn sample<G: Rng>(&self, rng: &mut G) -> f64 {
        match *self {
            CenteredFamily::SymmetricTwoPoint { size } => {
                if rng.gen::<bool>() {
                    size
                } else {
                    -size
                }
            }
            CenteredFamily::CenteredPoisson { lambda } => {
                use rand_distr::Distribution;
                rand_distr::Poisson::new(lambda).expect("validated").sample(rng) - lambda
            }
            CenteredFamily::CenteredExponential { scale } => {
                use rand_distr::Distribution;
                let e: f64 = rand_distr::Exp1.sample(rng);
                scale * e - scale
            }
        }
    }
}

/// Split-moment constant: 1/4 on (1,2], 1/6 on (2,3].
pub fn split_constant(p: f64) -> f64 {
    if p <= 2.0 {
        0.25
    } else {
        1.0 / 6.0
    }
}

/// E|a+X|^p ≥ C_p(|a|^p + E|X|^p) for zero-mean X, with the explicit
/// constants C_p = 1/4 on (1,2] and 1/6 on (2,3].
pub fn split_moment_check(family: CenteredFamily, a: f64, p: f64) -> Result<IneqCase, IneqError> {
    family.validate()?;
    if !(p > 1.0 && p <= 3.0) {
        return Err(IneqError::Invalid(format!("split check needs p in (1,3], got {p}")));
    }
    let (lhs, m1) = family.abs_moment_shifted(a, p);
    let (ex, m2) = family.abs_moment_shifted(0.0, p);
    let rhs = split_constant(p) * (a.abs().powf(p) + ex);
    let method = if m1 == Method::Quadrature || m2 == Method::Quadrature {
        Method::Quadrature
    } else {
        Method::ExactSeries
    };
    Ok(IneqCase::new("split_pmoment", format!("{family:?}, a={a}, p={p}"), lhs, rhs, method))
}

/// E|Σᵢ aᵢ(N(Aᵢ)−mᵢ)|^p ≥ C_p·(Σ|aᵢ|^p mᵢ)/(1 ∨ m_total)^{1−p/2}:
/// reports the ratio LHS/RHS. Uses exact product-Poisson enumeration when
/// the truncated lattice fits in 10⁷ points (tail < 1e−10), MC otherwise.
pub fn poisson_integral_lower_check<G: Rng>(
    cells: &[(f64, f64)],
    p: f64,
    rng: &mut G,
) -> Result<IneqCase, IneqError> {
    if cells.is_empty() {
        return Err(IneqError::Invalid("need at least one cell".into()));
    }
    if cells.iter().any(|&(_, m)| m < 0.0 || !m.is_finite()) {
        return Err(IneqError::Invalid("cell rates must be finite and >= 0".into()));
    }
    if !(p > 1.0 && p <= 2.0) {
        return Err(IneqError::Invalid(format!("check defined for p in (1,2], got {p}")));
    }
    let m_total: f64 = cells.iter().map(|&(_, m)| m).sum();
    let rhs = cells.iter().map(|&(a, m)| a.abs().powf(p) * m).sum::<f64>()
        / 1f64.max(m_total).powf(1.0 - p / 2.0);
    // per-cell truncation K with Poisson tail < 1e−10 / #cells
    let tail_target = 1e-13 / cells.len() as f64;
    let caps: Vec<usize> = cells
        .iter()
        .map(|&(_, m)| {
            let mut k = 0usize;
            let mut term = (-m).exp();
            let mut cum = term;
            while 1.0 - cum > tail_target && k < 400 {
                k += 1;
                term *= m / k as f64;
                cum += term;
            }
            k
        })
        .collect();
    let lattice: f64 = caps.iter().map(|&k| (k + 1) as f64).product();
    let (lhs, method) = if lattice <= 1e7 {
        // exact enumeration over the truncated product lattice with
        // precomputed per-cell pmf tables
        let pmfs: Vec<Vec<f64>> = cells
            .iter()
            .zip(&caps)
            .map(|(&(_, m), &cap)| {
                let mut tab = Vec::with_capacity(cap + 1);
                let mut pk = (-m).exp();
                tab.push(pk);
                for j in 1..=cap {
                    pk *= m / j as f64;
                    tab.push(pk);
                }
                tab
            })
            .collect();
        let mut idx = vec![0usize; cells.len()];
        let mut lhs = 0.0;
        loop {
            let mut prob = 1.0;
            let mut sum = 0.0;
            for ((&(a, m), &k), pmf) in cells.iter().zip(&idx).zip(&pmfs) {
                prob *= pmf[k];
                sum += a * (k as f64 - m);
            }
            lhs += prob * sum.abs().powf(p);
            // odometer increment
            let mut axis = 0;
            loop {
                if axis == idx.len() {
                    break;
                }
                idx[axis] += 1;
                if idx[axis] <= caps[axis] {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
            if axis == idx.len() {
                break;
            }
        }
        (lhs, Method::Enumeration)
    } else {
        use rand_distr::Distribution;
        let draws = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..draws {
            let mut s = 0.0;
            for &(a, m) in cells {
                let n = if m > 0.0 {
                    rand_distr::Poisson::new(m).expect("validated").sample(rng)
                } else {
                    0.0
                };
                s += a * (n - m);
            }
            let v = s.abs().powf(p);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / draws as f64;
        let se = ((sumsq / draws as f64 - mean * mean).max(0.0) / draws as f64).sqrt();
        (mean, Method::MonteCarlo { se })
    };
    // the inequality asserts existence of C_p > 0; the committed floor is
    // conservative and far below every observed ratio
    let floor = 1e-3;
    Ok(IneqCase::new(
        "poisson_integral_lower",
        format!("cells={cells:?}, p={p}"),
        lhs,
        floor * rhs,
        method,
    ))
}

/// Decoupling check: compare E|ΣHᵢξᵢ|^p with E|ΣHᵢξ̄ᵢ|^p where (ξ̄ᵢ) is an
/// independent copy and Hᵢ is a bounded predictable functional of both
/// pasts. Rademacher cases with n ≤ 6 are enumerated exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum XiFamily {
    Rademacher,
    CenteredExponential { scale: f64 },
}

/// Predictable coefficient rule: Hᵢ = 1 + ½·tanh(Σ_{j<i} w_j(ξ_j + ξ̄_j)).
fn predictable_h(weights: &[f64], xi: &[f64], xi_bar: &[f64], i: usize) -> f64 {
    let s: f64 = (0..i).map(|j| weights[j] * (xi[j] + xi_bar[j])).sum();
    1.0 + 0.5 * s.tanh()
}

pub fn decoupling_check<G: Rng>(
    family: XiFamily,
    n: usize,
    p: f64,
    weights: &[f64],
    rng: &mut G,
    draws: usize,
) -> Result<IneqCase, IneqError> {
    if n == 0 || weights.len() < n {
        return Err(IneqError::Invalid("need n >= 1 and a weight per index".into()));
    }
    if !(p > 0.0) {
        return Err(IneqError::Invalid(format!("need p > 0, got {p}")));
    }
    let eval = |xi: &[f64], xi_bar: &[f64]| -> (f64, f64) {
        let mut s = 0.0;
        let mut s_bar = 0.0;
        for i in 0..n {
            let h = predictable_h(weights, xi, xi_bar, i);
            s += h * xi[i];
            s_bar += h * xi_bar[i];
        }
        (s.abs().powf(p), s_bar.abs().powf(p))
    };
    let (lhs, rhs, method) = match family {
        XiFamily::Rademacher if n <= 6 => {
            // exhaustive over 2^{2n} sign patterns
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            let total = 1usize << (2 * n);
            for mask in 0..total {
                let xi: Vec<f64> =
                    (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
                let xi_bar: Vec<f64> =
                    (0..n).map(|i| if mask >> (n + i) & 1 == 1 { 1.0 } else { -1.0 }).collect();
                let (a, b) = eval(&xi, &xi_bar);
                lhs += a;
                rhs += b;
            }
            (lhs / total as f64, rhs / total as f64, Method::Enumeration)
        }
        _ => {
            let sample_one = |rng: &mut G| -> f64 {
                match family {
                    XiFamily::Rademacher => {
                        if rng.gen::<bool>() {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    XiFamily::CenteredExponential { scale } => {
                        CenteredFamily::CenteredExponential { scale }.sample(rng)
                    }
                }
            };
            let mut sums = (0.0, 0.0);
            let mut sq = (0.0, 0.0);
            for _ in 0..draws {
                let xi: Vec<f64> = (0..n).map(|_| sample_one(rng)).collect();
                let xi_bar: Vec<f64> = (0..n).map(|_| sample_one(rng)).collect();
                let (a, b) = eval(&xi, &xi_bar);
                sums.0 += a;
                sums.1 += b;
                sq.0 += a * a;
                sq.1 += b * b;
            }
            let la = sums.0 / draws as f64;
            let lb = sums.1 / draws as f64;
            let se = (((sq.0 / draws as f64 - la * la).max(0.0) / draws as f64).sqrt()
                + ((sq.1 / draws as f64 - lb * lb).max(0.0) / draws as f64).sqrt())
                / 2.0;
            (la, lb, Method::MonteCarlo { se })
        }
    };
    // two-sided claim: each moment controls the other up to a finite
    // constant; the committed check uses a generous factor of 100
    let worst = (lhs / rhs.max(1e-300)).max(rhs / lhs.max(1e-300));
    let case = IneqCase::new(
        "decoupling",
        format!("{family:?}, n={n}, p={p}"),
        100.0,
        worst,
        method,
    );
    Ok(case)
}

/// E[g(U,V)^p] for U uniform on (0,1) and V uniform on (0,1)^d, or a
/// divergence signal for p ≥ 1+2/d (the small-time exponent test).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GPowerMoment {
    Finite(f64),
    Divergent,
}

pub fn g_power_moment(params: &KernelParams<f64>, p: f64) -> Result<GPowerMoment, IneqError> {
    if !(p > 0.0) {
        return Err(IneqError::Invalid(format!("need p > 0, got {p}")));
    }
    let d = params.d as f64;
    // exponent test with a rounding guard so p = 1+2/d lands on the
    // divergent side for every d
    if d * (p - 1.0) / 2.0 >= 1.0 - 1e-12 {
        return Ok(GPowerMoment::Divergent);
    }
    let kappa = params.kappa;
    // inner axis integral ∫₀¹ e^{−p v²/(2κu)} dv = ½√(2κu/p)·γ(½, p/(2κu))
    let inner = |u: f64| -> f64 {
        0.5 * (2.0 * kappa * u / p).sqrt() * special::incomplete_gamma_lower(0.5, p / (2.0 * kappa * u))
    };
    let value = quad::integrate(
        |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            (2.0 * std::f64::consts::PI * kappa * u).powf(-p * d / 2.0) * inner(u).powi(params.d as i32)
        },
        0.0,
        1.0,
        QuadTol::new(1e-12, 1e-9),
    );
    Ok(GPowerMoment::Finite(value))
}
