//! Deterministic experiment harness.
//!
//! A sweep varies one parameter of a base [`JiveConfig`] over a grid, draws
//! `trials` independent instances per grid point and runs every requested
//! estimator on each instance. The instance seed of a cell is
//! `derive_seed(master_seed, [axis_index, trial])`; all methods see the same
//! instance so their errors are paired. Cells run concurrently but records are
//! aggregated in (axis value, method, trial) order, so the output does not
//! depend on scheduling or thread count.

mod csv;
mod fit;
mod presets;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use csv::{parse_csv, write_csv, write_plot_data, CSV_HEADER};
pub use fit::{fit_loglog, SlopeFit};
pub use presets::{log_grid, preset, PRESETS};

use crate::error::{JiveError, Result};
use crate::estimators::{ajive, oracle_estimate, stacked_svd, Estimate};
use crate::metrics::subspace_error;
use crate::model::{generate, JiveConfig};
use crate::rng::derive_seed;

/// Upper bound on the memory a single cell may need for its matrices.
pub const CELL_MEMORY_BUDGET: usize = 2 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    N,
    K,
    Theta,
    Sigma,
    D,
}

impl Axis {
    fn is_integer(self) -> bool {
        matches!(self, Axis::N | Axis::K | Axis::D)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::N => "n",
            Axis::K => "K",
            Axis::Theta => "theta",
            Axis::Sigma => "sigma",
            Axis::D => "d",
        })
    }
}

impl FromStr for Axis {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Axis::N),
            "K" => Ok(Axis::K),
            "theta" => Ok(Axis::Theta),
            "sigma" => Ok(Axis::Sigma),
            "d" => Ok(Axis::D),
            other => Err(JiveError::Parse(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ajive,
    Oracle,
    Stacked,
}

impl Method {
    /// Runs the estimator on a generated dataset.
    pub fn estimate(self, data: &crate::model::Dataset, r: usize, r_k: usize) -> Result<Estimate> {
        match self {
            Method::Ajive => ajive(data, r, &[r_k], false),
            Method::Oracle => {
                let truth = data
                    .truth
                    .as_ref()
                    .ok_or_else(|| JiveError::InvalidConfig("oracle estimator needs the true shared basis".into()))?;
                oracle_estimate(data, r, &[r_k], &truth.u_star)
            }
            Method::Stacked => stacked_svd(data, r),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ajive => "ajive",
            Method::Oracle => "oracle",
            Method::Stacked => "stacked",
        })
    }
}

impl FromStr for Method {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ajive" => Ok(Method::Ajive),
            "oracle" => Ok(Method::Oracle),
            "stacked" => Ok(Method::Stacked),
            other => Err(JiveError::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: JiveConfig,
    pub axis: Axis,
    /// Strictly increasing.
    pub axis_values: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(JiveError::InvalidConfig("sweep has no axis values".into()));
        }
        if self
            .axis_values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(JiveError::InvalidConfig(
                "axis values must be strictly increasing".into(),
            ));
        }
        if self.axis.is_integer() && self.axis_values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(JiveError::InvalidConfig(format!(
                "axis {} takes positive integers",
                self.axis
            )));
        }
        if self.trials == 0 {
            return Err(JiveError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(JiveError::InvalidConfig("no methods selected".into()));
        }
        for i in 0..self.axis_values.len() {
            let cfg = self.cell_config(i, 0);
            cfg.validate()?;
            let bytes = 2 * cfg.num_matrices * cfg.n * cfg.d * std::mem::size_of::<f64>();
            if bytes > CELL_MEMORY_BUDGET {
                return Err(JiveError::InvalidConfig(format!(
                    "a cell at {}={} needs about {} MiB, above the {} MiB budget",
                    self.axis,
                    self.axis_values[i],
                    bytes >> 20,
                    CELL_MEMORY_BUDGET >> 20
                )));
            }
        }
        Ok(())
    }

    /// Instance configuration of one cell.
    pub fn cell_config(&self, axis_index: usize, trial: usize) -> JiveConfig {
        let v = self.axis_values[axis_index];
        let mut cfg = self.base.clone();
        match self.axis {
            Axis::N => cfg.n = v as usize,
            Axis::K => cfg.num_matrices = v as usize,
            Axis::Theta => cfg.theta = v,
            Axis::Sigma => cfg.sigma = v,
            Axis::D => cfg.d = v as usize,
        }
        cfg.seed = derive_seed(self.master_seed, &[axis_index as u64, trial as u64]);
        cfg
    }
}

/// Outcome of one (axis value, method) cell group.
#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok,
    DegenerateGap,
    /// Some trials failed; statistics cover the rest.
    Partial {
        failed: usize,
    },
    /// Every trial failed; carries the first error tag.
    Failed(String),
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Ok => f.write_str("ok"),
            CellStatus::DegenerateGap => f.write_str("warn:degenerate_gap"),
            CellStatus::Partial { failed } => write!(f, "partial:{failed}_failed"),
            CellStatus::Failed(tag) => write!(f, "failed:{tag}"),
        }
    }
}

impl FromStr for CellStatus {
    type Err = JiveError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "ok" {
            return Ok(CellStatus::Ok);
        }
        if s == "warn:degenerate_gap" {
            return Ok(CellStatus::DegenerateGap);
        }
        if let Some(tag) = s.strip_prefix("failed:") {
            return Ok(CellStatus::Failed(tag.to_string()));
        }
        s.strip_prefix("partial:")
            .and_then(|r| r.strip_suffix("_failed"))
            .and_then(|n| n.parse().ok())
            .map(|failed| CellStatus::Partial { failed })
            .ok_or_else(|| JiveError::Parse(format!("unknown cell status `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub axis: Axis,
    pub axis_value: f64,
    pub method: Method,
    /// NaN when every trial failed.
    pub mean_error: f64,
    /// Standard error of the mean over the successful trials.
    pub std_error: f64,
    /// Number of successful trials.
    pub trials: usize,
    pub measured_theta_mean: f64,
    /// Summed estimator time; 0 unless timing was requested.
    pub wall_ms: f64,
    pub status: CellStatus,
}

impl SweepRecord {
    pub fn usable(&self) -> bool {
        !matches!(self.status, CellStatus::Failed(_))
    }
}

/// How cells are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecPolicy {
    /// Everything on the calling thread.
    Sequential,
    /// A rayon pool of the given size; 0 means one thread per core.
    Parallel { threads: usize },
}

impl ExecPolicy {
    /// Parallel with the thread count from `JIVE_THREADS` (0 or unset means
    /// automatic).
    pub fn from_env() -> Result<Self> {
        let threads = match std::env::var("JIVE_THREADS") {
            Ok(v) if !v.trim().is_empty() => v
                .trim()
                .parse()
                .map_err(|_| JiveError::InvalidConfig(format!("JIVE_THREADS must be an integer, got `{v}`")))?,
            _ => 0,
        };
        Ok(ExecPolicy::Parallel { threads })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub policy: ExecPolicy,
    /// Fill `wall_ms`. Off by default so that outputs are byte-reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            policy: ExecPolicy::Parallel { threads: 0 },
            timing: false,
        }
    }
}

struct MethodOutcome {
    error: Result<f64>,
    degenerate: bool,
    ms: f64,
}

struct CellOutcome {
    measured_theta: Option<f64>,
    methods: Vec<MethodOutcome>,
}

fn run_cell(cfg: &SweepConfig, axis_index: usize, trial: usize) -> CellOutcome {
    let inst = cfg.cell_config(axis_index, trial);
    let data = match generate(&inst) {
        Ok(d) => d,
        Err(e) => {
            return CellOutcome {
                measured_theta: None,
                methods: cfg
                    .methods
                    .iter()
                    .map(|_| MethodOutcome {
                        error: Err(e.clone()),
                        degenerate: false,
                        ms: 0.0,
                    })
                    .collect(),
            }
        }
    };
    let truth = data.truth.as_ref().expect("generated data carries its truth");
    let methods = cfg
        .methods
        .iter()
        .map(|m| {
            let start = Instant::now();
            let est = m.estimate(&data, inst.r, inst.r_k);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            match est {
                Ok(est) => MethodOutcome {
                    error: subspace_error(&est.u_hat, &truth.u_star),
                    degenerate: est.degenerate_gap,
                    ms,
                },
                Err(e) => MethodOutcome {
                    error: Err(e),
                    degenerate: false,
                    ms,
                },
            }
        })
        .collect();
    CellOutcome {
        measured_theta: Some(truth.measured_theta),
        methods,
    }
}

#[cfg(feature = "parallel")]
fn run_cells(cfg: &SweepConfig, policy: ExecPolicy) -> Result<Vec<CellOutcome>> {
    use rayon::prelude::*;
    let cells: Vec<(usize, usize)> = (0..cfg.axis_values.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .collect();
    let threads = match policy {
        ExecPolicy::Sequential => 1,
        ExecPolicy::Parallel { threads } => threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| JiveError::InvalidConfig(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(|&(i, t)| run_cell(cfg, i, t)).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_cells(cfg: &SweepConfig, _policy: ExecPolicy) -> Result<Vec<CellOutcome>> {
    Ok((0..cfg.axis_values.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .map(|(i, t)| run_cell(cfg, i, t))
        .collect())
}

/// Runs the sweep with the thread count from `JIVE_THREADS` and no timing.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with(
        cfg,
        RunOptions {
            policy: ExecPolicy::from_env()?,
            timing: false,
        },
    )
}

pub fn run_sweep_with(cfg: &SweepConfig, opts: RunOptions) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let outcomes = run_cells(cfg, opts.policy)?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();

    let mut records = Vec::with_capacity(cfg.axis_values.len() * methods.len());
    for (i, &value) in cfg.axis_values.iter().enumerate() {
        let cells = &outcomes[i * cfg.trials..(i + 1) * cfg.trials];
        let thetas: Vec<f64> = cells.iter().filter_map(|c| c.measured_theta).collect();
        let theta_mean = if thetas.is_empty() {
            f64::NAN
        } else {
            thetas.iter().sum::<f64>() / thetas.len() as f64
        };
        for &method in &methods {
            let slot = cfg.methods.iter().position(|m| *m == method).expect("method listed");
            let mut errors = Vec::with_capacity(cfg.trials);
            let mut first_err = None;
            let mut degenerate = false;
            let mut ms = 0.0;
            for cell in cells {
                let out = &cell.methods[slot];
                ms += out.ms;
                match &out.error {
                    Ok(e) => {
                        errors.push(*e);
                        degenerate |= out.degenerate;
                    }
                    Err(e) => {
                        first_err.get_or_insert_with(|| e.tag().to_string());
                    }
                }
            }
            let failed = cfg.trials - errors.len();
            let (mean, se) = mean_and_se(&errors);
            let status = if errors.is_empty() {
                CellStatus::Failed(first_err.unwrap_or_default())
            } else if failed > 0 {
                CellStatus::Partial { failed }
            } else if degenerate {
                CellStatus::DegenerateGap
            } else {
                CellStatus::Ok
            };
            records.push(SweepRecord {
                axis: cfg.axis,
                axis_value: value,
                method,
                mean_error: mean,
                std_error: se,
                trials: errors.len(),
                measured_theta_mean: theta_mean,
                wall_ms: if opts.timing { ms } else { 0.0 },
                status,
            });
        }
    }
    Ok(records)
}

/// Mean and standard error of the mean; `(NaN, NaN)` for no data.
fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    match xs.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (xs[0], 0.0),
        n => {
            let nf = n as f64;
            let mean = xs.iter().sum::<f64>() / nf;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            (mean, (var / nf).sqrt())
        }
    }
}
