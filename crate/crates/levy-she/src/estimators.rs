//! Ensemble observables: moment series with bootstrap errors, Lyapunov
//! exponent fits, Hill tail indices, intermittency-front scans and an
//! independent Volterra oracle for the d = 1 linear second moment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::EstimatorError;
use crate::fit;
use crate::simulator::FieldState;

/// Empirical E[|Y(t,·)|^p] over an ensemble at a reference point set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentSeries {
    pub times: Vec<f64>,
    pub orders: Vec<f64>,
    /// `estimates[i][j]` = estimate at times[i], orders[j].
    pub estimates: Vec<Vec<f64>>,
    /// Bootstrap standard errors, same shape.
    pub stderr: Vec<Vec<f64>>,
    /// Heavy-tail warning: nested-subsample means disagree by > 2 CIs.
    pub unstable: Vec<Vec<bool>>,
    pub replicas: usize,
    /// Per-replica point-set averages, `per_replica[r][i][j]`.
    #[serde(skip)]
    pub per_replica: Vec<Vec<Vec<f64>>>,
}

/// Point-set average of |Y|^p for one snapshot.
fn point_mean(state: &FieldState, points: &[usize], p: f64) -> f64 {
    points.iter().map(|&c| state.values[c].abs().powf(p)).sum::<f64>() / points.len() as f64
}

/// Reference point set: torus center plus 4 symmetric offsets (the field
/// is statistically homogeneous for constant initial data, so averaging
/// reduces variance without bias).
pub fn reference_points(grid: &crate::grid::Grid) -> Vec<usize> {
    let n = grid.cells;
    let q = n / 4;
    match grid.d {
        1 => vec![n / 2, q, n - 1 - q, n / 8, n - 1 - n / 8],
        _ => {
            let mid = n / 2;
            vec![
                mid * n + mid,
                q * n + q,
                q * n + (n - 1 - q),
                (n - 1 - q) * n + q,
                (n - 1 - q) * n + (n - 1 - q),
            ]
        }
    }
}

/// Moment estimates with bootstrap standard errors (`resamples` draws).
pub fn estimate_moments<G: Rng>(
    ensemble: &[Vec<FieldState>],
    orders: &[f64],
    points: &[usize],
    resamples: usize,
    rng: &mut G,
) -> Result<MomentSeries, EstimatorError> {
    if ensemble.is_empty() {
        return Err(EstimatorError::EmptyEnsemble);
    }
    if ensemble.len() < 2 {
        return Err(EstimatorError::Invalid("need at least 2 replicas".into()));
    }
    if points.is_empty() || orders.is_empty() {
        return Err(EstimatorError::Invalid("need a nonempty point set and order list".into()));
    }
    let times: Vec<f64> = ensemble[0].iter().map(|s| s.time).collect();
    if ensemble.iter().any(|tr| tr.len() != times.len()) {
        return Err(EstimatorError::Invalid("replica trajectories must share snapshot times".into()));
    }
    let n = ensemble.len();
    let per_replica: Vec<Vec<Vec<f64>>> = ensemble
        .iter()
        .map(|tr| {
            tr.iter()
                .map(|s| orders.iter().map(|&p| point_mean(s, points, p)).collect())
                .collect()
        })
        .collect();
    let mut estimates = vec![vec![0.0; orders.len()]; times.len()];
    let mut stderr = vec![vec![0.0; orders.len()]; times.len()];
    let mut unstable = vec![vec![false; orders.len()]; times.len()];
    for i in 0..times.len() {
        for j in 0..orders.len() {
            let vals: Vec<f64> = per_replica.iter().map(|r| r[i][j]).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            estimates[i][j] = mean;
            // bootstrap over replicas
            let mut boot = Vec::with_capacity(resamples);
            for _ in 0..resamples {
                let mut s = 0.0;
                for _ in 0..n {
                    s += vals[rng.gen_range(0..n)];
                }
                boot.push(s / n as f64);
            }
            let bm = boot.iter().sum::<f64>() / resamples.max(1) as f64;
            let var = boot.iter().map(|b| (b - bm) * (b - bm)).sum::<f64>()
                / resamples.max(2) as f64;
            stderr[i][j] = var.sqrt();
            // nested-subsample stability: first half vs full
            let half = &vals[..n / 2];
            let hm = half.iter().sum::<f64>() / half.len().max(1) as f64;
            if (hm - mean).abs() > 2.0 * stderr[i][j].max(1e-300) && stderr[i][j] > 0.0 {
                unstable[i][j] = true;
            }
        }
    }
    Ok(MomentSeries { times, orders: orders.to_vec(), estimates, stderr, unstable, replicas: n, per_replica })
}

impl MomentSeries {
    fn order_index(&self, p: f64) -> Result<usize, EstimatorError> {
        self.orders
            .iter()
            .position(|&q| (q - p).abs() < 1e-12)
            .ok_or_else(|| EstimatorError::Invalid(format!("order {p} not in the series")))
    }
}

/// Least-squares fit of log E[|Y|^p] against t on a time window, with a
/// bootstrap confidence interval over replicas.
pub fn lyapunov_fit<G: Rng>(
    series: &MomentSeries,
    p: f64,
    window: (f64, f64),
    rng: &mut G,
) -> Result<(f64, (f64, f64)), EstimatorError> {
    let j = series.order_index(p)?;
    let idx: Vec<usize> = (0..series.times.len())
        .filter(|&i| series.times[i] >= window.0 && series.times[i] <= window.1)
        .collect();
    if idx.len() < 5 {
        return Err(EstimatorError::Invalid(format!(
            "lyapunov window needs >= 5 time points, got {}",
            idx.len()
        )));
    }
    let slope_of = |means: &dyn Fn(usize) -> f64| -> Result<f64, EstimatorError> {
        let mut ts = Vec::new();
        let mut ls = Vec::new();
        for &i in &idx {
            let m = means(i);
            if !(m > 0.0) {
                return Err(EstimatorError::Invalid(format!(
                    "nonpositive moment estimate at t = {}",
                    series.times[i]
                )));
            }
            ts.push(series.times[i]);
            ls.push(m.ln());
        }
        Ok(fit::linear_fit(&ts, &ls).0)
    };
    let slope = slope_of(&|i| series.estimates[i][j])?;
    let n = series.replicas;
    let mut boots = Vec::new();
    for _ in 0..200 {
        let picks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let resampled = |i: usize| -> f64 {
            picks.iter().map(|&r| series.per_replica[r][i][j]).sum::<f64>() / n as f64
        };
        if let Ok(s) = slope_of(&resampled) {
            boots.push(s);
        }
    }
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ci = if boots.len() >= 40 {
        (boots[boots.len() / 40], boots[boots.len() - 1 - boots.len() / 40])
    } else {
        (slope, slope)
    };
    Ok((slope, ci))
}

/// Default top-order count for the Hill estimator: ⌈n^{2/3}⌉.
pub fn default_hill_k(n: usize) -> usize {
    (n as f64).powf(2.0 / 3.0).ceil() as usize
}

/// Hill estimate of the power-law tail index over the top `k` order
/// statistics, with the asymptotic-normality confidence interval
/// α̂·(1 ± 1.96/√k).
pub fn hill_tail_index(samples: &[f64], k: usize) -> Result<(f64, (f64, f64)), EstimatorError> {
    let mut positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    if k < 20 {
        return Err(EstimatorError::Invalid(format!("hill estimator needs k >= 20, got {k}")));
    }
    if positive.len() < 10 * k {
        return Err(EstimatorError::Invalid(format!(
            "hill estimator needs >= 10k positive samples, got {} for k = {k}",
            positive.len()
        )));
    }
    positive.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let x_k1 = positive[k];
    let mean_log = positive[..k].iter().map(|&x| (x / x_k1).ln()).sum::<f64>() / k as f64;
    if !(mean_log > 0.0) {
        return Err(EstimatorError::Invalid("degenerate order statistics".into()));
    }
    let alpha = 1.0 / mean_log;
    let half = 1.96 / (k as f64).sqrt();
    Ok((alpha, (alpha * (1.0 - half), alpha * (1.0 + half))))
}

/// Cone growth scan over a grid of speeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontScan {
    pub alphas: Vec<f64>,
    /// Fitted (1/t)·log sup_{|x| ≥ αt} Ê[|Y(t,x)|^p] per speed.
    pub growth: Vec<f64>,
    /// (largest α with growth > 0, smallest α with growth < 0), when the
    /// scan brackets the sign change.
    pub bracket: Option<(f64, f64)>,
}

/// Scan exponential growth/decay of the p-th moment outside the cone
/// |x| ≥ αt over the late-time window.
pub fn front_scan(
    ensemble: &[Vec<FieldState>],
    p: f64,
    alphas: &[f64],
    window: (f64, f64),
) -> Result<FrontScan, EstimatorError> {
    if ensemble.is_empty() {
        return Err(EstimatorError::EmptyEnsemble);
    }
    let grid = ensemble[0][0].grid;
    let times: Vec<f64> = ensemble[0].iter().map(|s| s.time).collect();
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= window.0 && times[i] <= window.1 && times[i] > 0.0)
        .collect();
    if idx.len() < 2 {
        return Err(EstimatorError::Invalid("front scan window needs >= 2 time points".into()));
    }
    let distances: Vec<f64> = (0..grid.len()).map(|c| grid.center_distance(c)).collect();
    let max_dist = grid.length / 2.0;
    let mut growth = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > 0.0) {
            return Err(EstimatorError::Invalid(format!("cone speed must be positive, got {alpha}")));
        }
        let mut ts = Vec::new();
        let mut ls = Vec::new();
        for &i in &idx {
            let radius = alpha * times[i];
            if radius >= max_dist {
                return Err(EstimatorError::Invalid(format!(
                    "cone |x| >= {radius} leaves the torus (half-length {max_dist})"
                )));
            }
            let mut sup = 0.0f64;
            for c in 0..grid.len() {
                if distances[c] < radius {
                    continue;
                }
                let mean = ensemble.iter().map(|tr| tr[i].values[c].abs().powf(p)).sum::<f64>()
                    / ensemble.len() as f64;
                sup = sup.max(mean);
            }
            if sup > 0.0 {
                ts.push(times[i]);
                ls.push(sup.ln());
            }
        }
        if ts.len() < 2 {
            growth.push(f64::NEG_INFINITY);
        } else {
            growth.push(fit::linear_fit(&ts, &ls).0);
        }
    }
    // sign-change bracket over the (sorted-ascending) speed grid
    let mut bracket = None;
    for w in 0..alphas.len().saturating_sub(1) {
        if growth[w] > 0.0 && growth[w + 1] < 0.0 {
            bracket = Some((alphas[w], alphas[w + 1]));
        }
    }
    Ok(FrontScan { alphas: alphas.to_vec(), growth, bracket })
}

/// Independent second-moment oracle for the d = 1 linear equation with
/// spatially constant initial data: solves
///   M(t) = 1 + v·σ₀²·(4πκ)^{−1/2} ∫₀^t (t−s)^{−1/2} M(s) ds
/// by product trapezoidal integration with the (t−s)^{−1/2} weight handled
/// exactly. Returns (times, M).
pub fn second_moment_oracle(
    kappa: f64,
    sigma0: f64,
    v: f64,
    horizon: f64,
    steps: usize,
) -> Result<(Vec<f64>, Vec<f64>), EstimatorError> {
    if !(kappa > 0.0 && horizon > 0.0) || steps < 2 {
        return Err(EstimatorError::Invalid(
            "oracle needs kappa > 0, horizon > 0 and >= 2 steps".into(),
        ));
    }
    if !(v >= 0.0 && sigma0 >= 0.0) {
        return Err(EstimatorError::Invalid("noise variance and sigma0 must be >= 0".into()));
    }
    let theta = v * sigma0 * sigma0 / (4.0 * std::f64::consts::PI * kappa).sqrt();
    let h = horizon / steps as f64;
    let ts: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let mut m = vec![1.0; steps + 1];
    for k in 1..=steps {
        // ∫_{t_j}^{t_{j+1}} (t_k−s)^{−1/2}·[linear interpolant] ds, exact
        let mut acc = 0.0; // known contributions
        let mut mk_coeff = 0.0; // coefficient of the unknown M_k
        for jj in 0..k {
            let a = (k - jj) as f64 * h; // t_k − t_j
            let b = (k - jj - 1) as f64 * h; // t_k − t_{j+1}
            let w_total = 2.0 * (a.sqrt() - b.sqrt());
            let w_lin = a * w_total - (2.0 / 3.0) * (a.powf(1.5) - b.powf(1.5));
            // interpolant M_j + (M_{j+1} − M_j)(s − t_j)/h
            let c_j = w_total - w_lin / h;
            let c_j1 = w_lin / h;
            acc += c_j * m[jj];
            if jj + 1 == k {
                mk_coeff = c_j1;
            } else {
                acc += c_j1 * m[jj + 1];
            }
        }
        m[k] = (1.0 + theta * acc) / (1.0 - theta * mk_coeff);
        if !m[k].is_finite() {
            return Err(EstimatorError::Invalid(format!("oracle diverged at t = {}", ts[k])));
        }
    }
    Ok((ts, m))
}
