//! Experiment runner: config parsing, sweep orchestration, persistence
//! and report/plot emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{self, ConstantsMode, LevelSet, RenewalKernel};
use crate::estimators;
use crate::grid::{self, Grid};
use crate::ineq::{self, CenteredFamily, GPowerMoment, IneqCase, XiFamily};
use crate::kernel::KernelParams;
use crate::noise::LevyNoiseSpec;
use crate::rng;
use crate::simulator::{self, FieldState, InitSpec, ModelConfig, SigmaSpec};

/// Fatal runner outcomes, split by the exit code they map to.
#[derive(Debug)]
pub enum CliError {
    /// Schema or parameter problem → exit code 2.
    Config(String),
    /// Runtime fault (simulation, IO) → exit code 1.
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Run(m) => write!(f, "run error: {m}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

fn io_err(context: &str, e: std::io::Error) -> CliError {
    CliError::Run(format!("{context}: {e}"))
}

pub const SCHEMA_VERSION: u32 = 1;

/// Experiment kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Bounds,
    Simulate,
    Moments,
    Tails,
    Front,
    Lab,
    Asymptotics,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<ExperimentKind> {
        match s {
            "bounds" => Some(ExperimentKind::Bounds),
            "simulate" => Some(ExperimentKind::Simulate),
            "moments" => Some(ExperimentKind::Moments),
            "tails" => Some(ExperimentKind::Tails),
            "front" => Some(ExperimentKind::Front),
            "lab" => Some(ExperimentKind::Lab),
            "asymptotics" => Some(ExperimentKind::Asymptotics),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Bounds => "bounds",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Tails => "tails",
            ExperimentKind::Front => "front",
            ExperimentKind::Lab => "lab",
            ExperimentKind::Asymptotics => "asymptotics",
        }
    }
}

/// `[model]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub d: u32,
    pub kappa: f64,
    pub sigma: SigmaSpec,
    pub init: InitSpec,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            d: 1,
            kappa: 1.0,
            sigma: SigmaSpec::Pam { sigma0: 1.0 },
            init: InitSpec::Constant { level: 1.0 },
        }
    }
}

/// `[numerics]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Numerics {
    pub cells: usize,
    /// Torus length per axis; 0 = derive from κ and the horizon.
    pub length_x: f64,
    /// Finite-difference step; 0 = event-driven backend.
    pub dt: f64,
    pub horizon_t: f64,
    pub replicas: usize,
    pub snapshot_times: Vec<f64>,
    /// Write per-replica trajectory files (simulate kind).
    pub store_replicas: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            cells: 64,
            length_x: 0.0,
            dt: 0.0,
            horizon_t: 2.0,
            replicas: 100,
            snapshot_times: Vec::new(),
            store_replicas: false,
        }
    }
}

/// `[sweep]` section: parameter axes and analysis knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Sweep {
    pub p_grid: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    /// Moment order for the κ-asymptotics studies.
    pub kappa_p_grid: Vec<f64>,
    pub epsilon: f64,
    /// Truncation level; 0 = derive from the jump measure.
    pub delta: f64,
    pub weight_c: f64,
    /// Lipschitz constant L; 0 = take it from σ (floor 1).
    pub lipschitz: f64,
    pub constants_mode: String,
    pub orders: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// Hill top-order count; 0 = ⌈n^{2/3}⌉.
    pub hill_k: usize,
    /// Evenly spaced spatial probe points pooled into the tail sample.
    pub tail_probes: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            p_grid: vec![1.5],
            kappa_grid: Vec::new(),
            kappa_p_grid: Vec::new(),
            epsilon: 0.1,
            delta: 0.0,
            weight_c: 0.0,
            lipschitz: 0.0,
            constants_mode: "normalized".into(),
            orders: vec![1.0, 2.0],
            alpha_grid: Vec::new(),
            hill_k: 0,
            tail_probes: 1,
        }
    }
}

/// Full experiment description (TOML).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub model: ModelSection,
    pub noise: LevyNoiseSpec,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub sweep: Sweep,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-path validation beyond what serde can express.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if !(1..=2).contains(&self.model.d) {
            return Err(CliError::Config(format!("model.d: must be 1 or 2, got {}", self.model.d)));
        }
        if !(self.model.kappa > 0.0 && self.model.kappa.is_finite()) {
            return Err(CliError::Config(format!(
                "model.kappa: must be positive, got {}",
                self.model.kappa
            )));
        }
        self.model.sigma.validate().map_err(|e| CliError::Config(format!("model.sigma: {e}")))?;
        self.model.init.validate().map_err(|e| CliError::Config(format!("model.init: {e}")))?;
        for (i, j) in self.noise.jumps.iter().enumerate() {
            j.validate().map_err(|e| CliError::Config(format!("noise.jumps[{i}]: {e}")))?;
        }
        self.noise.validate().map_err(|e| CliError::Config(format!("noise: {e}")))?;
        if self.numerics.cells < 2 {
            return Err(CliError::Config(format!(
                "numerics.cells: need >= 2, got {}",
                self.numerics.cells
            )));
        }
        if !(self.numerics.horizon_t > 0.0) {
            return Err(CliError::Config(format!(
                "numerics.horizon_t: must be positive, got {}",
                self.numerics.horizon_t
            )));
        }
        if self.numerics.replicas == 0 {
            return Err(CliError::Config("numerics.replicas: must be >= 1".into()));
        }
        for (i, &t) in self.numerics.snapshot_times.iter().enumerate() {
            if !(t >= 0.0 && t <= self.numerics.horizon_t) {
                return Err(CliError::Config(format!(
                    "numerics.snapshot_times[{i}]: {t} outside [0, horizon_t]"
                )));
            }
        }
        if !(self.sweep.epsilon > 0.0) {
            return Err(CliError::Config(format!(
                "sweep.epsilon: must be positive, got {}",
                self.sweep.epsilon
            )));
        }
        if self.sweep.tail_probes == 0 {
            return Err(CliError::Config(
                "sweep.tail_probes: need at least one probe point".into(),
            ));
        }
        if self.constants_mode().is_none() {
            return Err(CliError::Config(format!(
                "sweep.constants_mode: expected \"normalized\" or \"conservative\", got {:?}",
                self.sweep.constants_mode
            )));
        }
        Ok(())
    }

    pub fn constants_mode(&self) -> Option<ConstantsMode> {
        match self.sweep.constants_mode.as_str() {
            "normalized" => Some(ConstantsMode::Normalized),
            "conservative" => Some(ConstantsMode::conservative()),
            _ => None,
        }
    }

    fn model_config(&self) -> ModelConfig {
        ModelConfig {
            d: self.model.d,
            kappa: self.model.kappa,
            sigma: self.model.sigma,
            init: self.model.init,
            noise: self.noise.clone(),
        }
    }

    fn grid(&self) -> Result<Grid, CliError> {
        let length = if self.numerics.length_x > 0.0 {
            self.numerics.length_x
        } else {
            grid::default_length(self.model.kappa, self.numerics.horizon_t)
        };
        Grid::new(self.model.d, length, self.numerics.cells)
            .map_err(|e| CliError::Config(format!("numerics: {e}")))
    }

    fn snapshot_times(&self) -> Vec<f64> {
        if self.numerics.snapshot_times.is_empty() {
            let n = 10;
            (1..=n).map(|k| self.numerics.horizon_t * k as f64 / n as f64).collect()
        } else {
            self.numerics.snapshot_times.clone()
        }
    }

    fn delta(&self) -> f64 {
        if self.sweep.delta > 0.0 {
            self.sweep.delta
        } else {
            bounds::default_delta(&self.noise)
        }
    }

    fn lipschitz(&self) -> f64 {
        if self.sweep.lipschitz > 0.0 {
            self.sweep.lipschitz
        } else {
            let l = self.model.sigma.lipschitz();
            if l > 0.0 {
                l
            } else {
                1.0
            }
        }
    }

    /// Stable hash of the resolved config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::new();
        for b in digest.iter().take(8) {
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

// ---------------------------------------------------------------------
// artifact plumbing

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err("writing artifact", e))?;
    fs::rename(&tmp, path).map_err(|e| io_err("renaming artifact", e))?;
    Ok(())
}

/// Minimal RFC-4180 field quoting.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Deterministic float formatting (shortest round-trip).
fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

/// Row-oriented CSV accumulator with fixed provenance columns.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    provenance: Vec<String>,
}

impl Table {
    fn new(columns: &[&str], config_hash: &str, seed: u64) -> Table {
        let mut header = vec!["config_hash".to_string(), "seed".to_string(), "version".to_string()];
        header.extend(columns.iter().map(|c| c.to_string()));
        Table {
            header,
            rows: Vec::new(),
            provenance: vec![
                config_hash.to_string(),
                seed.to_string(),
                env!("CARGO_PKG_VERSION").to_string(),
            ],
        }
    }

    fn push(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len() + 3, self.header.len(), "row width mismatch");
        let mut row = self.provenance.clone();
        row.extend(cells);
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
        out.push_str("\r\n");
        for row in &self.rows {
            out.push_str(&row.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push_str("\r\n");
        }
        out
    }
}

/// Hand-rolled SVG polyline plot (log-y optional).
fn svg_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, Vec<(f64, f64)>)],
    log_y: bool,
) -> String {
    let (w, h, ml, mb) = (640.0, 420.0, 60.0, 40.0);
    let points: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().copied())
        .filter(|&(_, y)| !log_y || y > 0.0)
        .collect();
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = write!(svg, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">{title}</text>",
        w / 2.0
    );
    if !points.is_empty() {
        let ty = |y: f64| if log_y { y.ln() } else { y };
        let xmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let xmax = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let ymin = points.iter().map(|p| ty(p.1)).fold(f64::INFINITY, f64::min);
        let ymax = points.iter().map(|p| ty(p.1)).fold(f64::NEG_INFINITY, f64::max);
        let xspan = (xmax - xmin).max(1e-12);
        let yspan = (ymax - ymin).max(1e-12);
        let px = |x: f64| ml + (x - xmin) / xspan * (w - ml - 20.0);
        let py = |y: f64| (h - mb) - (ty(y) - ymin) / yspan * (h - mb - 40.0);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
        for (si, (label, pts)) in series.iter().enumerate() {
            let color = colors[si % colors.len()];
            let path: Vec<String> = pts
                .iter()
                .filter(|&&(_, y)| !log_y || y > 0.0)
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if path.len() >= 2 {
                let _ = write!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    path.join(" ")
                );
            }
            for p in &path {
                let (x, y) = p.split_once(',').unwrap();
                let _ = write!(svg, "<circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"{color}\"/>");
            }
            let _ = write!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{label}</text>",
                w - 150.0,
                40.0 + 14.0 * si as f64
            );
        }
        let _ = write!(
            svg,
            "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
            h - mb,
            w - 20.0,
            h - mb
        );
        let _ = write!(svg, "<line x1=\"{ml}\" y1=\"40\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>", h - mb);
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>",
        w / 2.0,
        h - 8.0
    );
    let _ = write!(
        svg,
        "<text x=\"14\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{y_label}</text>",
        h / 2.0,
        h / 2.0
    );
    svg.push_str("</svg>");
    svg
}

/// Everything one run leaves behind.
#[derive(Debug, Serialize)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub config_hash: String,
    /// Per-criterion or per-study verdicts for the summary.
    pub checks: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct LockFile<'a> {
    schema_version: u32,
    kind: &'a str,
    seed: u64,
    threads: usize,
    config_hash: String,
    version: &'static str,
    config: &'a ExperimentConfig,
}

fn write_outputs(
    out_dir: &Path,
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    seed: u64,
    threads: usize,
    table: &Table,
    summary: &BTreeMap<String, serde_json::Value>,
    svg: Option<String>,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir).map_err(|e| io_err("creating output directory", e))?;
    let lock = LockFile {
        schema_version: cfg.schema_version,
        kind: kind.name(),
        seed,
        threads,
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
    };
    atomic_write(
        &out_dir.join("config.lock.json"),
        serde_json::to_string_pretty(&lock).expect("lock serializes").as_bytes(),
    )?;
    atomic_write(&out_dir.join("results.csv"), table.to_csv().as_bytes())?;
    atomic_write(
        &out_dir.join("summary.json"),
        serde_json::to_string_pretty(summary).expect("summary serializes").as_bytes(),
    )?;
    if let Some(svg) = svg {
        atomic_write(&out_dir.join("plot.svg"), svg.as_bytes())?;
    }
    Ok(())
}

fn jnum(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

// ---------------------------------------------------------------------
// ensemble machinery

fn run_ensemble(
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<Vec<FieldState>>, CliError> {
    let model = cfg.model_config();
    let grid = cfg.grid()?;
    let times = cfg.snapshot_times();
    let use_fd = cfg.numerics.dt > 0.0;
    (0..cfg.numerics.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut stream = rng::stream(seed, r, 0);
            let result = if use_fd {
                simulator::solve_finite_difference(&model, grid, cfg.numerics.dt, &times, &mut stream)
            } else {
                simulator::solve_event_driven(&model, grid, &times, &mut stream)
            };
            result.map_err(|e| match e {
                crate::error::SimError::Config(m) => CliError::Config(m),
                other => CliError::Run(format!("replica {r} (seed {seed}): {other}")),
            })
        })
        .collect()
}

fn write_replica_files(
    out_dir: &Path,
    ensemble: &[Vec<FieldState>],
    config_hash: &str,
    seed: u64,
) -> Result<(), CliError> {
    let dir = out_dir.join("replicas");
    fs::create_dir_all(&dir).map_err(|e| io_err("creating replica directory", e))?;
    for (r, traj) in ensemble.iter().enumerate() {
        let mut text = format!("# config_hash={config_hash} seed={seed} replica={r}\r\n");
        let cells = traj.first().map(|s| s.values.len()).unwrap_or(0);
        let mut header = vec!["time".to_string()];
        header.extend((0..cells).map(|c| format!("v{c}")));
        text.push_str(&header.join(","));
        text.push_str("\r\n");
        for s in traj {
            let mut row = vec![fmt_f(s.time)];
            row.extend(s.values.iter().map(|&v| fmt_f(v)));
            text.push_str(&row.join(","));
            text.push_str("\r\n");
        }
        atomic_write(&dir.join(format!("replica_{r:05}.csv")), text.as_bytes())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// kind runners

fn run_bounds(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let _ = seed;
    let mode = cfg.constants_mode().expect("validated");
    let delta = cfg.delta();
    let lip = cfg.lipschitz();
    let kappas = if cfg.sweep.kappa_grid.is_empty() {
        vec![cfg.model.kappa]
    } else {
        cfg.sweep.kappa_grid.clone()
    };
    let mut beta0_curve = Vec::new();
    let mut beta1_curve = Vec::new();
    for &kappa in &kappas {
        let params = KernelParams::new(kappa, cfg.model.d)
            .map_err(|e| CliError::Config(format!("model.kappa: {e}")))?;
        for &p in &cfg.sweep.p_grid {
            let report = bounds::bound_report(
                &cfg.noise,
                &params,
                p,
                cfg.sweep.weight_c,
                lip,
                cfg.sweep.epsilon,
                delta,
                mode,
            )
            .map_err(|e| CliError::Run(format!("bound report at p={p}, kappa={kappa}: {e}")))?;
            if kappas.len() == 1 {
                beta0_curve.push((p, report.beta0));
                beta1_curve.push((p, report.malthusian_beta1));
            }
            table.push(vec![
                fmt_f(p),
                fmt_f(kappa),
                fmt_f(cfg.sweep.weight_c),
                fmt_f(report.beta0),
                fmt_f(report.upper_gamma_bound),
                report.front_upper.map(fmt_f).unwrap_or_default(),
                fmt_f(report.renewal_mass),
                fmt_f(report.malthusian_beta1),
                report.constants_mode.clone(),
            ]);
        }
    }
    // optional asymptotic-rate fit over the p-grid
    if beta0_curve.len() >= 3 {
        if let Ok(rate) = bounds::asymptotic_rate_p(&beta0_curve, cfg.model.d) {
            summary.insert("beta0_p_rate_fit".into(), jnum(rate));
        }
        let positive: Vec<(f64, f64)> =
            beta1_curve.iter().copied().filter(|&(_, b)| b > 0.0).collect();
        if positive.len() >= 3 {
            if let Ok(rate) = bounds::asymptotic_rate_p(&positive, cfg.model.d) {
                summary.insert("beta1_p_rate_fit".into(), jnum(rate));
            }
        }
    }
    summary.insert("rows".into(), serde_json::Value::from(table.rows.len()));
    let svg = svg_line_plot(
        "exponent bounds vs moment order",
        "p",
        "bound",
        &[("beta0", beta0_curve), ("beta1", beta1_curve)],
        true,
    );
    Ok(Some(svg))
}

fn run_asymptotics(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let _ = seed;
    let mode = cfg.constants_mode().expect("validated");
    let delta = cfg.delta();
    let lip = cfg.lipschitz();
    let d = cfg.model.d;
    let crit = 1.0 + 2.0 / d as f64;
    let params = KernelParams::new(cfg.model.kappa, d)
        .map_err(|e| CliError::Config(format!("model.kappa: {e}")))?;
    let mut all_ok = true;

    // study 1: normalized rate of beta0 and beta1 as p → 1+2/d
    if cfg.sweep.p_grid.len() >= 3 {
        let mut b0 = Vec::new();
        let mut b1 = Vec::new();
        for &p in &cfg.sweep.p_grid {
            let r = bounds::beta0(&cfg.noise, &params, p, 0.0, lip, mode)
                .map_err(|e| CliError::Run(format!("beta0 at p={p}: {e}")))?;
            b0.push((p, r.beta0));
            let kern = RenewalKernel::new(&cfg.noise, params, p, cfg.sweep.epsilon, delta, mode, LevelSet::Own)
                .map_err(|e| CliError::Run(format!("renewal kernel at p={p}: {e}")))?;
            let beta1 = kern.malthusian_exponent();
            if beta1 > 0.0 {
                b1.push((p, beta1));
            }
        }
        let target = 2.0 / d as f64;
        for (study, curve) in [("beta0_p_rate", &b0), ("beta1_p_rate", &b1)] {
            if curve.len() < 3 {
                continue;
            }
            let fitted = bounds::asymptotic_rate_p(curve, d)
                .map_err(|e| CliError::Run(format!("{study}: {e}")))?;
            let ok = (fitted - target).abs() / target <= 0.10;
            all_ok &= ok;
            table.push(vec![
                study.to_string(),
                fmt_f(f64::NAN),
                fmt_f(fitted),
                fmt_f(target),
                ok.to_string(),
            ]);
            summary.insert(study.to_string(), jnum(fitted));
        }
    }

    // study 2: κ-slope of beta1 and of the optimized front upper bound
    if cfg.sweep.kappa_grid.len() >= 3 {
        for &p in &cfg.sweep.kappa_p_grid {
            let mut b1 = Vec::new();
            let mut front = Vec::new();
            for &kappa in &cfg.sweep.kappa_grid {
                let kp = KernelParams::new(kappa, d)
                    .map_err(|e| CliError::Config(format!("sweep.kappa_grid: {e}")))?;
                let kern = RenewalKernel::new(
                    &cfg.noise,
                    kp,
                    p,
                    cfg.sweep.epsilon,
                    delta,
                    mode,
                    LevelSet::UnitDiffusion,
                )
                .map_err(|e| CliError::Run(format!("kernel at kappa={kappa}: {e}")))?;
                let beta1 = kern.malthusian_exponent();
                if beta1 > 0.0 {
                    b1.push((kappa, beta1));
                }
                let fr = bounds::front_rate_bounds(
                    &cfg.noise,
                    &kp,
                    p,
                    cfg.sweep.epsilon,
                    delta,
                    lip,
                    mode,
                    4.0,
                )
                .map_err(|e| CliError::Run(format!("front bounds at kappa={kappa}: {e}")))?;
                front.push((kappa, fr.upper_bound));
            }
            let x = crit - p;
            let beta1_target = -(p - 1.0) / x;
            if b1.len() >= 3 {
                let slope = bounds::asymptotic_rate_kappa(&b1)
                    .map_err(|e| CliError::Run(format!("beta1 kappa fit at p={p}: {e}")))?;
                let ok = (slope - beta1_target).abs() / beta1_target.abs() <= 0.05;
                all_ok &= ok;
                table.push(vec![
                    "beta1_kappa_slope".into(),
                    fmt_f(p),
                    fmt_f(slope),
                    fmt_f(beta1_target),
                    ok.to_string(),
                ]);
            }
            let front_target = (1.0 + 1.0 / d as f64 - p) / x;
            if front.len() >= 3 {
                let slope = bounds::asymptotic_rate_kappa(&front)
                    .map_err(|e| CliError::Run(format!("front kappa fit at p={p}: {e}")))?;
                let ok = if front_target.abs() > 1e-9 {
                    (slope - front_target).abs() / front_target.abs() <= 0.05
                } else {
                    slope.abs() <= 0.05
                };
                all_ok &= ok;
                table.push(vec![
                    "front_upper_kappa_slope".into(),
                    fmt_f(p),
                    fmt_f(slope),
                    fmt_f(front_target),
                    ok.to_string(),
                ]);
            }
        }
    }
    summary.insert("all_targets_met".into(), serde_json::Value::Bool(all_ok));
    Ok(None)
}

fn run_simulate(
    cfg: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let ensemble = run_ensemble(cfg, seed)?;
    if cfg.numerics.store_replicas {
        write_replica_files(out_dir, &ensemble, &cfg.hash(), seed)?;
    }
    let grid = cfg.grid()?;
    let center = grid.center_cell();
    let n = ensemble.len() as f64;
    let times = cfg.snapshot_times();
    let mut mean_curve = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let mean = ensemble.iter().map(|tr| tr[i].values[center]).sum::<f64>() / n;
        let mass = ensemble.iter().map(|tr| tr[i].mass()).sum::<f64>() / n;
        let min = ensemble
            .iter()
            .flat_map(|tr| tr[i].values.iter())
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let max = ensemble
            .iter()
            .flat_map(|tr| tr[i].values.iter())
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        mean_curve.push((t, mean));
        table.push(vec![fmt_f(t), fmt_f(mean), fmt_f(mass), fmt_f(min), fmt_f(max)]);
    }
    summary.insert("replicas".into(), serde_json::Value::from(cfg.numerics.replicas));
    let svg = svg_line_plot(
        "ensemble mean at the torus center",
        "t",
        "mean",
        &[("mean", mean_curve)],
        false,
    );
    Ok(Some(svg))
}

fn run_moments(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let ensemble = run_ensemble(cfg, seed)?;
    let grid = cfg.grid()?;
    let points = estimators::reference_points(&grid);
    // dedicated stream for the bootstrap so replica streams stay stable
    let mut boot_rng = rng::stream(seed, u64::MAX, 1);
    let series =
        estimators::estimate_moments(&ensemble, &cfg.sweep.orders, &points, 1000, &mut boot_rng)
            .map_err(|e| CliError::Run(format!("moment estimation: {e}")))?;
    let mut plot_series = Vec::new();
    let mut labels = Vec::new();
    for (j, &p) in series.orders.iter().enumerate() {
        labels.push(format!("p={p}"));
        let curve: Vec<(f64, f64)> =
            series.times.iter().zip(&series.estimates).map(|(&t, row)| (t, row[j])).collect();
        plot_series.push(curve);
        for (i, &t) in series.times.iter().enumerate() {
            table.push(vec![
                fmt_f(t),
                fmt_f(p),
                fmt_f(series.estimates[i][j]),
                fmt_f(series.stderr[i][j]),
                series.unstable[i][j].to_string(),
            ]);
        }
        // late-window Lyapunov fit when the sampling supports it
        let horizon = cfg.numerics.horizon_t;
        let window = (0.2 * horizon, horizon);
        let in_window =
            series.times.iter().filter(|&&t| t >= window.0 && t <= window.1).count();
        if in_window >= 5 {
            let mut rng = rng::stream(seed, u64::MAX, 2);
            if let Ok((slope, ci)) = estimators::lyapunov_fit(&series, p, window, &mut rng) {
                summary.insert(format!("lyapunov_p{p}"), jnum(slope));
                summary.insert(format!("lyapunov_p{p}_ci_lo"), jnum(ci.0));
                summary.insert(format!("lyapunov_p{p}_ci_hi"), jnum(ci.1));
            }
        }
    }
    summary.insert("replicas".into(), serde_json::Value::from(series.replicas));
    let named: Vec<(&str, Vec<(f64, f64)>)> =
        labels.iter().map(|l| l.as_str()).zip(plot_series).collect();
    Ok(Some(svg_line_plot("moment estimates", "t", "E|Y|^p", &named, true)))
}

fn run_tails(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let ensemble = run_ensemble(cfg, seed)?;
    let grid = cfg.grid()?;
    let center = grid.center_cell();
    // pool evenly spaced probe points; separations far beyond the kernel
    // width make the pooled values effectively independent tail samples
    let probes: Vec<usize> = if cfg.sweep.tail_probes <= 1 {
        vec![center]
    } else {
        let n_cells = grid.len();
        let stride = (n_cells / cfg.sweep.tail_probes).max(1);
        (0..cfg.sweep.tail_probes.min(n_cells)).map(|i| i * stride).collect()
    };
    let samples: Vec<f64> = ensemble
        .iter()
        .flat_map(|tr| {
            let values = &tr.last().expect("snapshots").values;
            probes.iter().map(move |&i| values[i])
        })
        .collect();
    let n = samples.len();
    let k_default = if cfg.sweep.hill_k > 0 {
        cfg.sweep.hill_k
    } else {
        estimators::default_hill_k(n)
    };
    // stability export across a k-ladder around the default
    let mut curve = Vec::new();
    for factor in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let k = ((k_default as f64 * factor) as usize).max(20);
        if n < 10 * k {
            continue;
        }
        let (alpha, ci) = estimators::hill_tail_index(&samples, k)
            .map_err(|e| CliError::Run(format!("hill estimate at k={k}: {e}")))?;
        curve.push((k as f64, alpha));
        table.push(vec![k.to_string(), fmt_f(alpha), fmt_f(ci.0), fmt_f(ci.1)]);
        if k == k_default {
            summary.insert("hill_alpha".into(), jnum(alpha));
            summary.insert("hill_k".into(), serde_json::Value::from(k));
        }
    }
    summary.insert("samples".into(), serde_json::Value::from(n));
    Ok(Some(svg_line_plot("Hill stability plot", "k", "alpha", &[("alpha", curve)], false)))
}

fn run_front(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    if cfg.model.init.positive_floor().is_some() {
        return Err(CliError::Config(
            "model.init: front scans need decaying initial data (exp_decay or indicator)".into(),
        ));
    }
    if !cfg.model.sigma.fixes_zero() {
        return Err(CliError::Config("model.sigma: front scans need sigma(0) = 0".into()));
    }
    if cfg.sweep.alpha_grid.is_empty() {
        return Err(CliError::Config("sweep.alpha_grid: must be nonempty for front scans".into()));
    }
    let ensemble = run_ensemble(cfg, seed)?;
    let p = cfg.sweep.p_grid.first().copied().unwrap_or(1.5);
    let horizon = cfg.numerics.horizon_t;
    let scan = estimators::front_scan(&ensemble, p, &cfg.sweep.alpha_grid, (0.5 * horizon, horizon))
        .map_err(|e| CliError::Run(format!("front scan: {e}")))?;
    let mut curve = Vec::new();
    for (&alpha, &g) in scan.alphas.iter().zip(&scan.growth) {
        curve.push((alpha, g));
        table.push(vec![fmt_f(alpha), fmt_f(g)]);
    }
    if let Some((lo, hi)) = scan.bracket {
        summary.insert("front_bracket_lo".into(), jnum(lo));
        summary.insert("front_bracket_hi".into(), jnum(hi));
    }
    Ok(Some(svg_line_plot("cone growth scan", "alpha", "growth rate", &[("growth", curve)], false)))
}

fn push_case(table: &mut Table, case: &IneqCase) {
    let method = match case.method {
        ineq::Method::ExactSeries => "exact-series".to_string(),
        ineq::Method::Quadrature => "quadrature".to_string(),
        ineq::Method::Enumeration => "enumeration".to_string(),
        ineq::Method::MonteCarlo { se } => format!("monte-carlo se={}", fmt_f(se)),
    };
    table.push(vec![
        case.id.clone(),
        case.instance.clone(),
        fmt_f(case.lhs),
        fmt_f(case.rhs),
        fmt_f(case.margin),
        method,
        case.holds().to_string(),
    ]);
}

fn run_lab(
    cfg: &ExperimentConfig,
    seed: u64,
    table: &mut Table,
    summary: &mut BTreeMap<String, serde_json::Value>,
) -> Result<Option<String>, CliError> {
    let mut violations = 0usize;
    let mut min_margin: BTreeMap<String, f64> = BTreeMap::new();
    let mut record = |table: &mut Table, case: IneqCase| {
        if !case.holds() {
            violations += 1;
        }
        let entry = min_margin.entry(case.id.clone()).or_insert(f64::INFINITY);
        *entry = entry.min(case.margin);
        push_case(table, &case);
    };

    // Poisson moment bound: 200 exact cases
    let lambdas: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let rs: Vec<f64> = (1..=10).map(|i| 0.25 * i as f64).collect();
    let (cases, best) =
        ineq::poisson_moment_suite(&lambdas, &rs).map_err(|e| CliError::Run(format!("{e}")))?;
    for case in cases {
        record(table, case);
    }
    summary.insert("poisson_moment_best_constant".into(), jnum(best));

    // split-moment: 10⁴ exact/quadrature cases
    let mut rng = rng::stream(seed, 0, 100);
    for _ in 0..10_000 {
        let family = match rng.gen_range(0..3) {
            0 => CenteredFamily::SymmetricTwoPoint { size: rng.gen_range(0.1..4.0) },
            1 => CenteredFamily::CenteredPoisson { lambda: rng.gen_range(0.1..6.0) },
            _ => CenteredFamily::CenteredExponential { scale: rng.gen_range(0.1..3.0) },
        };
        let a = rng.gen_range(-5.0..5.0);
        let p = rng.gen_range(1.0001..3.0);
        let case = ineq::split_moment_check(family, a, p)
            .map_err(|e| CliError::Run(format!("split case: {e}")))?;
        record(table, case);
    }

    // Poisson integral lower bound: 500 enumerated cases
    let mut rng = rng::stream(seed, 0, 101);
    let mut min_ratio = f64::INFINITY;
    let mut done = 0;
    while done < 500 {
        let k = rng.gen_range(1..=3);
        let cells: Vec<(f64, f64)> =
            (0..k).map(|_| (rng.gen_range(-2.0..2.0f64), rng.gen_range(0.05..20.0))).collect();
        if cells.iter().all(|&(a, _)| a.abs() < 1e-3) {
            continue;
        }
        let p = rng.gen_range(1.1..=2.0);
        let case = ineq::poisson_integral_lower_check(&cells, p, &mut rng)
            .map_err(|e| CliError::Run(format!("poi-ineq case: {e}")))?;
        let bare = case.rhs / 1e-3;
        if bare > 0.0 {
            min_ratio = min_ratio.min(case.lhs / bare);
        }
        record(table, case);
        done += 1;
    }
    summary.insert("poi_ineq_min_ratio".into(), jnum(min_ratio));

    // decoupling: 100 MC cases
    let mut rng = rng::stream(seed, 0, 102);
    for i in 0..100 {
        let family = if i % 2 == 0 {
            XiFamily::Rademacher
        } else {
            XiFamily::CenteredExponential { scale: rng.gen_range(0.2..2.0) }
        };
        let n = rng.gen_range(2..=6);
        let p = rng.gen_range(1.1..2.5);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let case = ineq::decoupling_check(family, n, p, &weights, &mut rng, 20_000)
            .map_err(|e| CliError::Run(format!("decoupling case: {e}")))?;
        record(table, case);
    }

    // kernel power moment scan
    let params = KernelParams::new(cfg.model.kappa, cfg.model.d)
        .map_err(|e| CliError::Config(format!("model.kappa: {e}")))?;
    let crit = 1.0 + 2.0 / cfg.model.d as f64;
    let mut diverged_at_crit = false;
    for i in 0..8 {
        let p = 1.0 + (crit - 1.0) * (0.3 + 0.1 * i as f64);
        let verdict = ineq::g_power_moment(&params, p).map_err(|e| CliError::Run(format!("{e}")))?;
        let (value, tag) = match verdict {
            GPowerMoment::Finite(v) => (fmt_f(v), "finite"),
            GPowerMoment::Divergent => (String::new(), "divergent"),
        };
        if p >= crit && tag == "divergent" {
            diverged_at_crit = true;
        }
        table.push(vec![
            "g_power_moment".into(),
            format!("d={}, kappa={}, p={p}", cfg.model.d, cfg.model.kappa),
            value,
            String::new(),
            String::new(),
            "quadrature".into(),
            tag.into(),
        ]);
    }
    let _ = diverged_at_crit;

    summary.insert("violations".into(), serde_json::Value::from(violations));
    for (id, m) in &min_margin {
        summary.insert(format!("min_margin_{id}"), jnum(*m));
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// public entry points

/// Run one experiment; artifacts land in `out_dir`.
pub fn run(
    kind: ExperimentKind,
    config_path: &Path,
    seed: u64,
    threads: usize,
    out_dir: &Path,
) -> Result<RunArtifacts, CliError> {
    let cfg = ExperimentConfig::from_path(config_path)?;
    run_resolved(kind, &cfg, seed, threads, out_dir)
}

/// Run with an already-parsed config (used by the acceptance tests).
pub fn run_resolved(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    seed: u64,
    threads: usize,
    out_dir: &Path,
) -> Result<RunArtifacts, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Run(format!("thread pool: {e}")))?;
    let hash = cfg.hash();
    let mut summary: BTreeMap<String, serde_json::Value> = BTreeMap::new();
    summary.insert("kind".into(), serde_json::Value::from(kind.name()));
    summary.insert("config_hash".into(), serde_json::Value::from(hash.clone()));
    summary.insert("seed".into(), serde_json::Value::from(seed));
    let columns: &[&str] = match kind {
        ExperimentKind::Bounds => &[
            "p", "kappa", "c", "beta0", "upper_gamma_bound", "front_upper", "renewal_mass",
            "beta1", "constants_mode",
        ],
        ExperimentKind::Asymptotics => &["study", "p", "fitted", "target", "within_band"],
        ExperimentKind::Simulate => &["time", "center_mean", "mean_mass", "min", "max"],
        ExperimentKind::Moments => &["time", "p", "estimate", "stderr", "unstable"],
        ExperimentKind::Tails => &["k", "alpha", "ci_lo", "ci_hi"],
        ExperimentKind::Front => &["alpha", "growth"],
        ExperimentKind::Lab => &["id", "instance", "lhs", "rhs", "margin", "method", "holds"],
    };
    let mut table = Table::new(columns, &hash, seed);
    let svg = pool.install(|| match kind {
        ExperimentKind::Bounds => run_bounds(cfg, seed, &mut table, &mut summary),
        ExperimentKind::Asymptotics => run_asymptotics(cfg, seed, &mut table, &mut summary),
        ExperimentKind::Simulate => run_simulate(cfg, seed, out_dir, &mut table, &mut summary),
        ExperimentKind::Moments => run_moments(cfg, seed, &mut table, &mut summary),
        ExperimentKind::Tails => run_tails(cfg, seed, &mut table, &mut summary),
        ExperimentKind::Front => run_front(cfg, seed, &mut table, &mut summary),
        ExperimentKind::Lab => run_lab(cfg, seed, &mut table, &mut summary),
    })?;
    write_outputs(out_dir, kind, cfg, seed, threads, &table, &summary, svg)?;
    let mut checks = BTreeMap::new();
    if let Some(serde_json::Value::Bool(b)) = summary.get("all_targets_met") {
        checks.insert("all_targets_met".to_string(), *b);
    }
    if let Some(v) = summary.get("violations").and_then(|v| v.as_u64()) {
        checks.insert("zero_violations".to_string(), v == 0);
    }
    Ok(RunArtifacts { out_dir: out_dir.to_path_buf(), config_hash: hash, checks })
}

/// Verdict of a cell-wise artifact comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CompareVerdict {
    Equal,
    StatisticallyEquivalent,
    Different,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub verdict: CompareVerdict,
    pub parameter_diffs: Vec<String>,
    pub differing_cells: usize,
    pub equivalent_cells: usize,
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    // artifact CSVs never put separators inside quoted fields other than
    // instance descriptions, so a small stateful split suffices
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        let mut fields = Vec::new();
        let mut cur = String::new();
        let mut in_quotes = false;
        let mut chars = line.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '"' if in_quotes && chars.peek() == Some(&'"') => {
                    cur.push('"');
                    chars.next();
                }
                '"' => in_quotes = !in_quotes,
                ',' if !in_quotes => fields.push(std::mem::take(&mut cur)),
                _ => cur.push(c),
            }
        }
        fields.push(cur);
        rows.push(fields);
    }
    rows
}

/// Compare two artifact directories.
pub fn compare(dir_a: &Path, dir_b: &Path) -> Result<CompareReport, CliError> {
    let lock = |dir: &Path| -> Result<serde_json::Value, CliError> {
        let text = fs::read_to_string(dir.join("config.lock.json"))
            .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))
    };
    let la = lock(dir_a)?;
    let lb = lock(dir_b)?;
    if la.get("schema_version") != lb.get("schema_version") {
        return Err(CliError::Config("schema versions differ".into()));
    }
    // flat parameter diff on the resolved configs
    let mut parameter_diffs = Vec::new();
    fn walk(prefix: &str, a: &serde_json::Value, b: &serde_json::Value, out: &mut Vec<String>) {
        match (a, b) {
            (serde_json::Value::Object(ma), serde_json::Value::Object(mb)) => {
                let keys: std::collections::BTreeSet<_> = ma.keys().chain(mb.keys()).collect();
                for k in keys {
                    let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(
                        &path,
                        ma.get(k).unwrap_or(&serde_json::Value::Null),
                        mb.get(k).unwrap_or(&serde_json::Value::Null),
                        out,
                    );
                }
            }
            _ if a != b => out.push(format!("{prefix}: {a} != {b}")),
            _ => {}
        }
    }
    walk(
        "config",
        la.get("config").unwrap_or(&serde_json::Value::Null),
        lb.get("config").unwrap_or(&serde_json::Value::Null),
        &mut parameter_diffs,
    );

    let ra = fs::read_to_string(dir_a.join("results.csv"))
        .map_err(|e| CliError::Config(format!("{}: {e}", dir_a.display())))?;
    let rb = fs::read_to_string(dir_b.join("results.csv"))
        .map_err(|e| CliError::Config(format!("{}: {e}", dir_b.display())))?;
    if ra == rb {
        return Ok(CompareReport {
            verdict: CompareVerdict::Equal,
            parameter_diffs,
            differing_cells: 0,
            equivalent_cells: 0,
        });
    }
    let ta = parse_csv(&ra);
    let tb = parse_csv(&rb);
    if ta.first() != tb.first() || ta.len() != tb.len() {
        return Ok(CompareReport {
            verdict: CompareVerdict::Different,
            parameter_diffs,
            differing_cells: usize::MAX,
            equivalent_cells: 0,
        });
    }
    let header = &ta[0];
    let stderr_col = header.iter().position(|h| h == "stderr" || h == "ci_lo");
    let mut differing = 0;
    let mut equivalent = 0;
    for (row_a, row_b) in ta[1..].iter().zip(&tb[1..]) {
        for (col, (ca, cb)) in row_a.iter().zip(row_b).enumerate() {
            if ca == cb || header[col] == "config_hash" || header[col] == "seed" {
                continue;
            }
            match (ca.parse::<f64>(), cb.parse::<f64>()) {
                (Ok(va), Ok(vb)) => {
                    // CI-aware equivalence: within 3 joint standard errors
                    let band = stderr_col
                        .and_then(|sc| {
                            let sa = row_a.get(sc)?.parse::<f64>().ok()?;
                            let sb = row_b.get(sc)?.parse::<f64>().ok()?;
                            Some(3.0 * (sa + sb))
                        })
                        .unwrap_or(0.0);
                    if (va - vb).abs() <= band {
                        equivalent += 1;
                    } else {
                        differing += 1;
                    }
                }
                _ => differing += 1,
            }
        }
    }
    let verdict = if differing == 0 {
        CompareVerdict::StatisticallyEquivalent
    } else {
        CompareVerdict::Different
    };
    Ok(CompareReport { verdict, parameter_diffs, differing_cells: differing, equivalent_cells: equivalent })
}
