//! Trajectory generation on a periodic torus: a spectral heat semigroup,
//! an exact event-driven backend for finite-activity jump noise, an
//! explicit finite-difference backend, a Picard fixed-point reference and
//! paired comparison runs on a shared realization.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::grid::Grid;
use crate::noise::{BoxRealization, LevyNoiseSpec, sample_box};

/// Multiplicative nonlinearity σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SigmaSpec {
    /// σ(y) = σ₀·y (parabolic Anderson model).
    Pam { sigma0: f64 },
    /// σ(y) = l_floor·y + (l − l_floor)·y/(1+y²): Lipschitz constant ≤ l,
    /// |σ(y)|/|y| ≥ l_floor, σ(0) = 0.
    LipschitzFloor { l: f64, l_floor: f64 },
    /// σ ≡ 1 (additive noise).
    Constant,
}

impl SigmaSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            SigmaSpec::Pam { sigma0 } => {
                if !sigma0.is_finite() || sigma0 < 0.0 {
                    return Err(SimError::Config(format!("sigma0 must be >= 0, got {sigma0}")));
                }
            }
            SigmaSpec::LipschitzFloor { l, l_floor } => {
                if !(l.is_finite() && l_floor.is_finite() && l >= l_floor && l_floor >= 0.0) {
                    return Err(SimError::Config(format!(
                        "need l >= l_floor >= 0, got l = {l}, l_floor = {l_floor}"
                    )));
                }
            }
            SigmaSpec::Constant => {}
        }
        Ok(())
    }

    pub fn apply(&self, y: f64) -> f64 {
        match *self {
            SigmaSpec::Pam { sigma0 } => sigma0 * y,
            SigmaSpec::LipschitzFloor { l, l_floor } => {
                l_floor * y + (l - l_floor) * y / (1.0 + y * y)
            }
            SigmaSpec::Constant => 1.0,
        }
    }

    /// Lipschitz constant L.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            SigmaSpec::Pam { sigma0 } => sigma0,
            SigmaSpec::LipschitzFloor { l, .. } => l,
            SigmaSpec::Constant => 0.0,
        }
    }

    /// Growth floor L_σ = inf |σ(y)|/|y|.
    pub fn floor(&self) -> f64 {
        match *self {
            SigmaSpec::Pam { sigma0 } => sigma0,
            SigmaSpec::LipschitzFloor { l_floor, .. } => l_floor,
            SigmaSpec::Constant => 0.0,
        }
    }

    /// σ(0) = 0?
    pub fn fixes_zero(&self) -> bool {
        !matches!(self, SigmaSpec::Constant)
    }

    /// Monotonicity needed by the comparison hypothesis. For the
    /// floor family the derivative is ≥ l_floor − (l−l_floor)/8.
    pub fn nondecreasing(&self) -> bool {
        match *self {
            SigmaSpec::Pam { sigma0 } => sigma0 >= 0.0,
            SigmaSpec::LipschitzFloor { l, l_floor } => l_floor - (l - l_floor) / 8.0 >= 0.0,
            SigmaSpec::Constant => true,
        }
    }

    /// σ₀ when σ is exactly linear.
    pub fn linear_coefficient(&self) -> Option<f64> {
        match *self {
            SigmaSpec::Pam { sigma0 } => Some(sigma0),
            _ => None,
        }
    }
}

/// Initial condition f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InitSpec {
    /// f ≡ level.
    Constant { level: f64 },
    /// f(x) = amplitude·e^{−rate·|x|}.
    ExpDecay { amplitude: f64, rate: f64 },
    /// f = 1 on the centered box [−half_width, half_width]^d.
    Indicator { half_width: f64 },
}

impl InitSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        match *self {
            InitSpec::Constant { level } => {
                if !level.is_finite() || level < 0.0 {
                    return Err(SimError::Config(format!("initial level must be >= 0, got {level}")));
                }
            }
            InitSpec::ExpDecay { amplitude, rate } => {
                if !(amplitude.is_finite() && amplitude >= 0.0 && rate > 0.0 && rate.is_finite()) {
                    return Err(SimError::Config(format!(
                        "exp-decay initial condition needs amplitude >= 0 and rate > 0, got {amplitude}, {rate}"
                    )));
                }
            }
            InitSpec::Indicator { half_width } => {
                if !(half_width >= 0.0 && half_width.is_finite()) {
                    return Err(SimError::Config(format!(
                        "indicator half-width must be >= 0, got {half_width}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            InitSpec::Constant { level } => level,
            InitSpec::ExpDecay { amplitude, rate } => {
                let r = x.iter().map(|&c| c * c).sum::<f64>().sqrt();
                amplitude * (-rate * r).exp()
            }
            InitSpec::Indicator { half_width } => {
                if x.iter().all(|&c| c.abs() <= half_width) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// inf f > 0, for the hypotheses that need a positive floor.
    pub fn positive_floor(&self) -> Option<f64> {
        match *self {
            InitSpec::Constant { level } if level > 0.0 => Some(level),
            _ => None,
        }
    }
}

/// Full model description for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: u32,
    pub kappa: f64,
    pub sigma: SigmaSpec,
    pub init: InitSpec,
    pub noise: LevyNoiseSpec,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(1..=2).contains(&self.d) {
            return Err(SimError::Config(format!("simulation supports d in {{1,2}}, got {}", self.d)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(SimError::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        self.sigma.validate()?;
        self.init.validate()?;
        self.noise.validate()?;
        Ok(())
    }
}

/// Field snapshot on the torus grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub time: f64,
    pub values: Vec<f64>,
}

impl FieldState {
    /// The initial condition sampled at cell centers.
    pub fn initial(config: &ModelConfig, grid: Grid) -> FieldState {
        let values = (0..grid.len()).map(|i| config.init.eval(&grid.coord(i))).collect();
        FieldState { grid, time: 0.0, values }
    }

    fn check_finite(&self) -> Result<(), SimError> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(SimError::FieldFault { time: self.time })
        }
    }

    /// ∑ values · Δx^d.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

thread_local! {
    // planner reuse: plans are cached per size, which matters when a long
    // jump chain calls the semigroup thousands of times
    static PLANNER: std::cell::RefCell<FftPlanner<f64>> = std::cell::RefCell::new(FftPlanner::new());
}

fn fft_axis(planner: &mut FftPlanner<f64>, data: &mut [Complex<f64>], n: usize, inverse: bool) {
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for chunk in data.chunks_exact_mut(n) {
        fft.process(chunk);
    }
}

fn transpose(data: &[Complex<f64>], n: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); data.len()];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = data[i * n + j];
        }
    }
    out
}

/// Apply a real Fourier multiplier m(|k|²) on the torus, where k runs over
/// the frequencies 2π·j/L per axis.
fn apply_spectral_multiplier(grid: &Grid, values: &[f64], mult: impl Fn(f64) -> f64) -> Vec<f64> {
    PLANNER.with(|p| apply_spectral_multiplier_with(&mut p.borrow_mut(), grid, values, mult))
}

fn apply_spectral_multiplier_with(
    planner: &mut FftPlanner<f64>,
    grid: &Grid,
    values: &[f64],
    mult: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let n = grid.cells;
    let mut data: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let freq = |j: usize| -> f64 {
        let signed = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        2.0 * std::f64::consts::PI * signed / grid.length
    };
    match grid.d {
        1 => {
            fft_axis(planner, &mut data, n, false);
            for (j, c) in data.iter_mut().enumerate() {
                let w = freq(j);
                *c *= mult(w * w);
            }
            fft_axis(planner, &mut data, n, true);
        }
        _ => {
            fft_axis(planner, &mut data, n, false);
            data = transpose(&data, n);
            fft_axis(planner, &mut data, n, false);
            for i in 0..n {
                for j in 0..n {
                    let (wi, wj) = (freq(i), freq(j));
                    data[i * n + j] *= mult(wi * wi + wj * wj);
                }
            }
            fft_axis(planner, &mut data, n, true);
            data = transpose(&data, n);
            fft_axis(planner, &mut data, n, true);
        }
    }
    let scale = 1.0 / (n as f64).powi(grid.d as i32);
    data.iter().map(|c| c.re * scale).collect()
}

/// Exact periodic heat semigroup: each Fourier mode k is multiplied by
/// e^{−κ|k|²dt/2}.
pub fn heat_propagate(state: &FieldState, kappa: f64, dt: f64) -> FieldState {
    assert!(dt >= 0.0, "heat propagation needs dt >= 0");
    if dt == 0.0 {
        return state.clone();
    }
    let values = apply_spectral_multiplier(&state.grid, &state.values, |k2| {
        (-kappa * k2 * dt / 2.0).exp()
    });
    FieldState { grid: state.grid, time: state.time + dt, values }
}

/// Drift step ∂_t Y = b·σ(Y) over `dt`: exact exponential for linear σ,
/// explicit Euler substeps of size ≤ 0.01/(|b|L) otherwise.
fn drift_step(state: &mut FieldState, sigma: &SigmaSpec, b: f64, dt: f64) {
    if b == 0.0 || dt == 0.0 {
        return;
    }
    if let Some(sigma0) = sigma.linear_coefficient() {
        let factor = (b * sigma0 * dt).exp();
        for v in &mut state.values {
            *v *= factor;
        }
        return;
    }
    let lip = sigma.lipschitz();
    let dt_drift = (0.01 / (b.abs() * lip + 1e-300)).min(dt);
    let mut done = 0.0;
    while done < dt {
        let h = dt_drift.min(dt - done);
        for v in &mut state.values {
            *v += h * b * sigma.apply(*v);
        }
        done += h;
    }
}

/// Sample the noise realization on the full torus × (t0, t1).
pub fn sample_realization<G: Rng>(
    config: &ModelConfig,
    grid: &Grid,
    t0: f64,
    t1: f64,
    rng: &mut G,
) -> Result<BoxRealization, SimError> {
    Ok(sample_box(&config.noise, t0, t1, grid.volume(), grid.d, rng)?)
}

/// Advance a field through one inter-event interval: heat semigroup, then
/// the drift substep.
fn advance(state: &mut FieldState, config: &ModelConfig, dt: f64) -> Result<(), SimError> {
    if dt <= 0.0 {
        return Ok(());
    }
    *state = heat_propagate(state, config.kappa, dt);
    drift_step(state, &config.sigma, config.noise.effective_drift(), dt);
    state.check_finite()
}

/// Run the jump-chain scheme against a fixed realization, snapshotting at
/// the requested times (sorted ascending). Jumps at a snapshot time are
/// applied before the snapshot is taken.
pub fn evolve_with_realization(
    config: &ModelConfig,
    grid: Grid,
    realization: &BoxRealization,
    snap_times: &[f64],
) -> Result<Vec<FieldState>, SimError> {
    config.validate()?;
    if config.noise.gaussian != 0.0 {
        return Err(SimError::Config(
            "the event-driven backend handles pure-jump noise; set rho = 0".into(),
        ));
    }
    if snap_times.windows(2).any(|w| w[0] > w[1]) || snap_times.iter().any(|&t| t < 0.0) {
        return Err(SimError::Config("snapshot times must be sorted and nonnegative".into()));
    }
    let dx_vol = grid.cell_volume();
    let mut state = FieldState::initial(config, grid);
    state.check_finite()?;
    let mut snapshots = Vec::with_capacity(snap_times.len());
    let mut jump_iter = realization.jumps.iter().peekable();
    for &t_snap in snap_times {
        while let Some(j) = jump_iter.peek() {
            if j.t > t_snap {
                break;
            }
            let j = jump_iter.next().expect("peeked");
            let dt = j.t - state.time;
            advance(&mut state, config, dt)?;
            let cell = grid.cell_of_fractional(&j.x);
            state.values[cell] += config.sigma.apply(state.values[cell]) * j.z / dx_vol;
            state.check_finite()?;
        }
        let dt = t_snap - state.time;
        advance(&mut state, config, dt)?;
        snapshots.push(state.clone());
    }
    Ok(snapshots)
}

/// Event-driven solve: samples the jump chain on the torus up to the last
/// snapshot time and runs the exact jump-chain scheme.
pub fn solve_event_driven<G: Rng>(
    config: &ModelConfig,
    grid: Grid,
    snap_times: &[f64],
    rng: &mut G,
) -> Result<Vec<FieldState>, SimError> {
    config.validate()?;
    let horizon = snap_times.last().copied().unwrap_or(0.0);
    let realization = if horizon > 0.0 && config.noise.total_rate() > 0.0 {
        sample_realization(config, &grid, 0.0, horizon, rng)?
    } else {
        BoxRealization { jumps: Vec::new(), gaussian: 0.0, drift: 0.0 }
    };
    evolve_with_realization(config, grid, &realization, snap_times)
}

/// Explicit Euler finite-difference solve with step `dt`. Snapshots are
/// taken at the step times nearest the requested times. The Gaussian part
/// is supported in d = 1 only.
pub fn solve_finite_difference<G: Rng>(
    config: &ModelConfig,
    grid: Grid,
    dt: f64,
    snap_times: &[f64],
    rng: &mut G,
) -> Result<Vec<FieldState>, SimError> {
    config.validate()?;
    let dx = grid.dx();
    let stability = dx * dx / (2.0 * config.kappa * config.d as f64);
    if !(dt > 0.0) || dt > stability {
        return Err(SimError::Config(format!(
            "explicit stability requires 0 < dt <= dx^2/(2*kappa*d) = {stability}, got {dt}"
        )));
    }
    if config.noise.gaussian != 0.0 && config.d != 1 {
        return Err(SimError::Config("Gaussian noise part is supported in d = 1 only".into()));
    }
    if snap_times.windows(2).any(|w| w[0] > w[1]) || snap_times.iter().any(|&t| t < 0.0) {
        return Err(SimError::Config("snapshot times must be sorted and nonnegative".into()));
    }
    let horizon = snap_times.last().copied().unwrap_or(0.0);
    let n_steps = (horizon / dt).round().max(0.0) as usize;
    let snap_steps: Vec<usize> =
        snap_times.iter().map(|&t| ((t / dt).round() as usize).min(n_steps)).collect();
    // jump sampling goes through the whole-torus box; the Gaussian part is
    // drawn per cell, so strip it from the box spec
    let jumps_only = LevyNoiseSpec { gaussian: 0.0, ..config.noise.clone() };
    let rho = config.noise.gaussian;
    let b_eff = config.noise.effective_drift();
    let dx_vol = grid.cell_volume();
    let n = grid.len();
    let cells_per_axis = grid.cells;
    let mut state = FieldState::initial(config, grid);
    state.check_finite()?;
    let mut snapshots = Vec::with_capacity(snap_times.len());
    let mut next_snap = 0;
    while next_snap < snap_steps.len() && snap_steps[next_snap] == 0 {
        snapshots.push(state.clone());
        next_snap += 1;
    }
    let lap_coeff = config.kappa / 2.0 / (dx * dx);
    let mut scratch = vec![0.0; n];
    for step in 0..n_steps {
        let t0 = step as f64 * dt;
        let realization = sample_box(&jumps_only, t0, t0 + dt, grid.volume(), grid.d, rng)?;
        // explicit update from the pre-step field
        match config.d {
            1 => {
                for i in 0..n {
                    let left = state.values[(i + n - 1) % n];
                    let right = state.values[(i + 1) % n];
                    scratch[i] = left + right - 2.0 * state.values[i];
                }
            }
            _ => {
                let m = cells_per_axis;
                for i in 0..m {
                    for j in 0..m {
                        let idx = i * m + j;
                        let up = state.values[((i + m - 1) % m) * m + j];
                        let down = state.values[((i + 1) % m) * m + j];
                        let left = state.values[i * m + (j + m - 1) % m];
                        let right = state.values[i * m + (j + 1) % m];
                        scratch[idx] = up + down + left + right - 4.0 * state.values[idx];
                    }
                }
            }
        }
        let mut new_values: Vec<f64> = (0..n)
            .map(|i| {
                let y = state.values[i];
                let mut v = y + dt * lap_coeff * scratch[i] + dt * b_eff * config.sigma.apply(y);
                if rho != 0.0 {
                    let z: f64 = StandardNormal.sample(rng);
                    v += config.sigma.apply(y) * rho * (dt * dx_vol).sqrt() * z / dx_vol;
                }
                v
            })
            .collect();
        for j in &realization.jumps {
            let cell = grid.cell_of_fractional(&j.x);
            new_values[cell] += config.sigma.apply(state.values[cell]) * j.z / dx_vol;
        }
        state.values = new_values;
        state.time = (step + 1) as f64 * dt;
        state.check_finite()?;
        while next_snap < snap_steps.len() && snap_steps[next_snap] == step + 1 {
            snapshots.push(state.clone());
            next_snap += 1;
        }
    }
    Ok(snapshots)
}

/// Picard iteration against a fixed realization.
#[derive(Debug, Clone)]
pub struct PicardRun {
    /// Common time grid (uniform steps merged with the jump times).
    pub times: Vec<f64>,
    /// `iterates[n][k]` is iterate n at `times[k]` (post-jump values).
    pub iterates: Vec<Vec<Vec<f64>>>,
}

impl PicardRun {
    /// sup-norm distance between successive iterates at the final time.
    pub fn final_gaps(&self) -> Vec<f64> {
        self.iterates
            .windows(2)
            .map(|w| {
                w[0].last()
                    .unwrap()
                    .iter()
                    .zip(w[1].last().unwrap())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Build the Picard sequence Y^{(0)} = heat-evolved f, Y^{(n)} = heat f +
/// convolution of σ(Y^{(n−1)}) against the fixed realization.
pub fn picard_reference(
    config: &ModelConfig,
    grid: Grid,
    horizon: f64,
    n_iters: usize,
    realization: &BoxRealization,
    n_steps: usize,
) -> Result<PicardRun, SimError> {
    config.validate()?;
    if !(horizon > 0.0) || n_steps < 1 {
        return Err(SimError::Config("picard reference needs a positive horizon and steps".into()));
    }
    if config.noise.gaussian != 0.0 {
        return Err(SimError::Config("picard reference handles pure-jump noise; set rho = 0".into()));
    }
    // merged time grid: uniform steps plus jump times
    let mut times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * horizon / n_steps as f64).collect();
    times.extend(realization.jumps.iter().map(|j| j.t).filter(|&t| t > 0.0 && t < horizon));
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    // jump deposits grouped by grid-time index
    let mut jumps_at: Vec<Vec<(usize, f64)>> = vec![Vec::new(); times.len()];
    for j in &realization.jumps {
        if j.t <= 0.0 || j.t >= horizon {
            continue;
        }
        let k = times
            .iter()
            .position(|&t| (t - j.t).abs() < 1e-12)
            .expect("jump time was merged into the grid");
        jumps_at[k].push((grid.cell_of_fractional(&j.x), j.z));
    }
    let b_eff = config.noise.effective_drift();
    let dx_vol = grid.cell_volume();
    let init = FieldState::initial(config, grid);

    // iterate 0: pure heat evolution of the initial condition
    let mut prev_traj: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    {
        let mut state = init.clone();
        prev_traj.push(state.values.clone());
        for k in 1..times.len() {
            state = heat_propagate(&state, config.kappa, times[k] - times[k - 1]);
            prev_traj.push(state.values.clone());
        }
    }
    // pre-jump cell values of the previous iterate, indexed like jumps_at
    let mut prev_jump_args: Vec<Vec<f64>> =
        jumps_at.iter().enumerate().map(|(k, js)| js.iter().map(|&(c, _)| prev_traj[k][c]).collect()).collect();

    let mut iterates = vec![prev_traj.clone()];
    for _ in 0..n_iters {
        let mut state = init.clone();
        let mut traj: Vec<Vec<f64>> = Vec::with_capacity(times.len());
        let mut jump_args: Vec<Vec<f64>> = vec![Vec::new(); times.len()];
        traj.push(state.values.clone());
        for k in 1..times.len() {
            let dt = times[k] - times[k - 1];
            state = heat_propagate(&state, config.kappa, dt);
            if b_eff != 0.0 {
                for (v, &y_prev) in state.values.iter_mut().zip(&iterates.last().unwrap()[k - 1]) {
                    *v += dt * b_eff * config.sigma.apply(y_prev);
                }
            }
            for (j_idx, &(cell, z)) in jumps_at[k].iter().enumerate() {
                jump_args[k].push(state.values[cell]);
                state.values[cell] += config.sigma.apply(prev_jump_args[k][j_idx]) * z / dx_vol;
            }
            state.check_finite().map_err(|_| SimError::FieldFault { time: times[k] })?;
            traj.push(state.values.clone());
        }
        prev_jump_args = jump_args;
        iterates.push(traj);
    }
    Ok(PicardRun { times, iterates })
}

/// Outcome of a paired comparison run.
#[derive(Debug, Clone)]
pub struct ComparisonOutcome {
    pub high: Vec<FieldState>,
    pub low: Vec<FieldState>,
    /// Cells where the ordering Y₁ ≥ Y₂ failed beyond rounding.
    pub violations: usize,
    /// min over all snapshot cells of Y₁ − Y₂.
    pub min_gap: f64,
}

/// Run two initial conditions f₁ ≥ f₂ ≥ 0 against the identical noise
/// realization and report pointwise ordering statistics.
pub fn comparison_run<G: Rng>(
    config: &ModelConfig,
    init_low: InitSpec,
    grid: Grid,
    snap_times: &[f64],
    rng: &mut G,
) -> Result<ComparisonOutcome, SimError> {
    config.validate()?;
    init_low.validate()?;
    if !config.noise.nonnegative {
        return Err(SimError::Config(
            "comparison requires the nonnegative-noise flag (jump support in (0,inf), rho = 0)".into(),
        ));
    }
    if !config.sigma.nondecreasing() {
        return Err(SimError::Config("comparison requires a non-decreasing sigma".into()));
    }
    let high_init = FieldState::initial(config, grid);
    let low_config = ModelConfig { init: init_low, ..config.clone() };
    let low_init = FieldState::initial(&low_config, grid);
    if high_init.values.iter().zip(&low_init.values).any(|(h, l)| h < l || *l < 0.0) {
        return Err(SimError::Config("comparison requires f1 >= f2 >= 0 pointwise".into()));
    }
    let horizon = snap_times.last().copied().unwrap_or(0.0);
    let realization = if horizon > 0.0 && config.noise.total_rate() > 0.0 {
        sample_realization(config, &grid, 0.0, horizon, rng)?
    } else {
        BoxRealization { jumps: Vec::new(), gaussian: 0.0, drift: 0.0 }
    };
    let high = evolve_with_realization(config, grid, &realization, snap_times)?;
    let low = evolve_with_realization(&low_config, grid, &realization, snap_times)?;
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    for (h, l) in high.iter().zip(&low) {
        for (&yh, &yl) in h.values.iter().zip(&l.values) {
            let gap = yh - yl;
            if gap < -1e-10 * (1.0 + yl.abs()) {
                violations += 1;
            }
            min_gap = min_gap.min(gap);
        }
    }
    Ok(ComparisonOutcome { high, low, violations, min_gap })
}
