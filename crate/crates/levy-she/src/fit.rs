//! Small least-squares fitting helpers shared by the bounds and
//! estimator modules.

/// Ordinary least squares y = slope·x + intercept.
///
/// Panics if fewer than two distinct x values are given.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(xs.len() >= 2, "need at least two points");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    assert!(sxx > 0.0, "need at least two distinct x values");
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of log y against log x (both coordinates must be positive).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Slope of log y against x on the tail of a series, skipping the first
/// `skip_frac` fraction of the samples (transient). Only points with y > 0
/// enter the fit.
pub fn late_time_log_slope(ts: &[f64], ys: &[f64], skip_frac: f64) -> Option<f64> {
    let start = (ts.len() as f64 * skip_frac).floor() as usize;
    let mut xs = Vec::new();
    let mut ls = Vec::new();
    for (&t, &y) in ts[start..].iter().zip(&ys[start..]) {
        if y > 0.0 {
            xs.push(t);
            ls.push(y.ln());
        }
    }
    if xs.len() < 2 || xs.iter().all(|&x| x == xs[0]) {
        return None;
    }
    Some(linear_fit(&xs, &ls).0)
}
