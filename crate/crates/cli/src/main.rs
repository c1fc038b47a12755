//! `jivelab` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, invalid
//! configurations, unreadable files), 2 for numerical failures. Results go to
//! stdout as `key=value` text; diagnostics go to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use jivelab::estimators::{ajive, oracle_estimate, stacked_svd};
use jivelab::harness::{
    fit_loglog, preset, run_sweep_with, write_csv, write_plot_data, Axis, ExecPolicy, Method, RunOptions, SweepConfig,
    PRESETS,
};
use jivelab::io::{config_from_meta, format_meta, parse_meta, read_matrix, write_matrix};
use jivelab::metrics::{identifiability_check, subspace_error};
use jivelab::model::{counterexample_stacked, generate, Dataset, JiveConfig, LoadingScheme, MisalignScheme};
use jivelab::momentlab::{mc_verify, random_operands, Identity};
use jivelab::{JiveError, OrthonormalBasis};

const META_FILE: &str = "truth.meta";
const U_STAR_FILE: &str = "u_star.mat";
const COUNTEREXAMPLE_KEY: &str = "counterexample_epsilon";

#[derive(Parser, Debug)]
#[command(
    name = "jivelab",
    version,
    about = "Shared-subspace estimation experiments under the JIVE model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic instance into a directory
    Gen(GenArgs),
    /// Write the two-matrix instance on which stacked SVD fails
    Counterexample(CounterexampleArgs),
    /// Estimate the shared subspace from a directory of matrices
    Estimate(EstimateArgs),
    /// Run a parameter sweep and write CSV plus plot data
    Sweep(SweepArgs),
    /// Run one of the named figure sweeps
    Preset(PresetArgs),
    /// Fit a log-log slope to a sweep CSV
    Slope(SlopeArgs),
    /// Check the identifiability conditions of an instance
    Verify(VerifyArgs),
    /// Monte-Carlo check of a Gaussian moment identity
    Moments(MomentsArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Row dimension
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Column dimension of every matrix
    #[arg(long, default_value_t = 20)]
    d: usize,
    /// Number of matrices
    #[arg(long = "K", default_value_t = 100)]
    k: usize,
    /// Shared rank
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Unique rank of every matrix
    #[arg(long, default_value_t = 2)]
    rk: usize,
    /// Target misalignment of the unique subspaces
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Noise standard deviation
    #[arg(long, default_value_t = 1e-3)]
    sigma: f64,
    /// Scale of the unique loadings
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Unique-subspace construction: randomized or two-group
    #[arg(long, default_value = "randomized")]
    misalign: MisalignScheme,
    /// Loading construction: random, shared or oracle-hard
    #[arg(long, default_value = "random")]
    loading: LoadingScheme,
}

impl ModelArgs {
    fn config(&self, seed: u64) -> JiveConfig {
        JiveConfig {
            n: self.n,
            d: self.d,
            num_matrices: self.k,
            r: self.r,
            r_k: self.rk,
            theta: self.theta,
            sigma: self.sigma,
            gamma: self.gamma,
            misalign_scheme: self.misalign,
            loading_scheme: self.loading,
            seed,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Instance seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    /// Size of the unique component
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Output directory, created if missing
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Directory holding A_0.mat, A_1.mat, ... and optionally truth.meta and u_star.mat
    #[arg(long)]
    dir: PathBuf,
    /// Estimator: ajive, oracle or stacked
    #[arg(long)]
    method: Method,
    /// Shared rank [default: from truth.meta]
    #[arg(long)]
    r: Option<usize>,
    /// Unique rank [default: from truth.meta]
    #[arg(long)]
    rk: Option<usize>,
    /// Where to write the estimated basis [default: <dir>/u_hat.mat]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter to vary: n, K, theta, sigma or d
    #[arg(long)]
    axis: Axis,
    /// Comma-separated, strictly increasing axis values
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Instances per axis value
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Comma-separated estimators
    #[arg(long, value_delimiter = ',', default_value = "ajive")]
    methods: Vec<Method>,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; plot data goes next to it with a .gp extension
    #[arg(long)]
    out: PathBuf,
    /// Record wall-clock times (makes the CSV non-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// Figure panel
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    name: String,
    /// Instances per axis value [default: 100]
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed [default: the preset's]
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; plot data goes next to it with a .gp extension
    #[arg(long)]
    out: PathBuf,
    /// Record wall-clock times (makes the CSV non-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct SlopeArgs {
    /// Sweep CSV
    csv: PathBuf,
    /// Estimator whose records are fitted
    #[arg(long, default_value = "ajive")]
    method: Method,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Rebuild the instance described by this truth.meta instead of the flags
    #[arg(long)]
    meta: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Instance seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    /// EAE, EAET, TrEAE, D4_1 ... D4_8 or ODD5
    #[arg(long)]
    identity: Identity,
    /// Monte-Carlo draws of the noise matrix
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Seed for operands and draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Rows of the noise matrix
    #[arg(long, default_value_t = 3)]
    n1: usize,
    /// Columns of the noise matrix
    #[arg(long, default_value_t = 4)]
    n2: usize,
}

type Outcome = Result<String, JiveError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Preset(a) => cmd_preset(a),
        Command::Slope(a) => cmd_slope(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Moments(a) => cmd_moments(a),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> JiveError {
    JiveError::Io(format!("{}: {e}", path.display()))
}

fn matrix_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("A_{k}.mat"))
}

/// Writes the observed matrices, the metadata and the shared basis.
fn write_instance(dir: &Path, data: &Dataset, extra_meta: &str) -> Result<(), JiveError> {
    let (config, truth) = data
        .config
        .as_ref()
        .zip(data.truth.as_ref())
        .expect("generated instances carry config and truth");
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (k, a) in data.a.iter().enumerate() {
        write_matrix(&matrix_path(dir, k), a)?;
    }
    let meta = format!("{}{extra_meta}", format_meta(config, truth));
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, meta).map_err(|e| io_err(&meta_path, e))?;
    write_matrix(&dir.join(U_STAR_FILE), truth.u_star.mat())
}

fn instance_summary(dir: &Path, data: &Dataset) -> String {
    let truth = data.truth.as_ref().expect("generated");
    format!(
        "out={} matrices={} measured_theta={:.16e} sigma_min={:.16e} kappa={:.16e} identifiability_violated={}\n",
        dir.display(),
        data.num_matrices(),
        truth.measured_theta,
        truth.sigma_min,
        truth.kappa,
        truth.identifiability_violated
    )
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let data = generate(&a.model.config(a.seed))?;
    write_instance(&a.out, &data, "")?;
    Ok(instance_summary(&a.out, &data))
}

fn cmd_counterexample(a: CounterexampleArgs) -> Outcome {
    let data = counterexample_stacked(a.epsilon)?;
    write_instance(&a.out, &data, &format!("{COUNTEREXAMPLE_KEY}={:.16e}\n", a.epsilon))?;
    Ok(instance_summary(&a.out, &data))
}

fn read_meta(path: &Path) -> Result<std::collections::BTreeMap<String, String>, JiveError> {
    parse_meta(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

fn cmd_estimate(a: EstimateArgs) -> Outcome {
    let mut mats = Vec::new();
    while matrix_path(&a.dir, mats.len()).exists() {
        mats.push(read_matrix(&matrix_path(&a.dir, mats.len()))?);
    }
    if mats.is_empty() {
        return Err(JiveError::Io(format!("{}: no A_0.mat found", a.dir.display())));
    }
    let data = Dataset::from_matrices(mats)?;
    let meta_path = a.dir.join(META_FILE);
    let meta = if meta_path.exists() {
        Some(read_meta(&meta_path)?)
    } else {
        None
    };
    let rank = |given: Option<usize>, key: &str| -> Result<usize, JiveError> {
        match (given, meta.as_ref().and_then(|m| m.get(key))) {
            (Some(v), _) => Ok(v),
            (None, Some(raw)) => raw
                .parse()
                .map_err(|_| JiveError::Parse(format!("meta `{key}` has bad value `{raw}`"))),
            (None, None) => Err(JiveError::InvalidConfig(format!(
                "no truth.meta in {}; pass --{}",
                a.dir.display(),
                if key == "r" { "r" } else { "rk" }
            ))),
        }
    };
    let r = rank(a.r, "r")?;
    let r_k = rank(a.rk, "r_k")?;
    let u_star_path = a.dir.join(U_STAR_FILE);
    let u_star = if u_star_path.exists() {
        Some(OrthonormalBasis::new(read_matrix(&u_star_path)?)?)
    } else {
        None
    };

    let start = Instant::now();
    let est = match a.method {
        Method::Ajive => ajive(&data, r, &[r_k], false)?,
        Method::Stacked => stacked_svd(&data, r)?,
        Method::Oracle => {
            let u = u_star
                .as_ref()
                .ok_or_else(|| JiveError::InvalidConfig("the oracle estimator needs u_star.mat".into()))?;
            oracle_estimate(&data, r, &[r_k], u)?
        }
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let out = a.out.unwrap_or_else(|| a.dir.join("u_hat.mat"));
    write_matrix(&out, est.u_hat.mat())?;
    let error = match &u_star {
        Some(u) => format!("{:.16e}", subspace_error(&est.u_hat, u)?),
        None => "nan".to_string(),
    };
    let gap = est.gap().map_or_else(|| "nan".to_string(), |g| format!("{g:.16e}"));
    Ok(format!(
        "method={} error={error} gap={gap} degenerate_gap={} wall_ms={wall_ms:.3} out={}\n",
        a.method,
        est.degenerate_gap,
        out.display()
    ))
}

fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

fn run_and_write(cfg: &SweepConfig, out: &Path, timing: bool) -> Outcome {
    let opts = RunOptions {
        policy: ExecPolicy::from_env()?,
        timing,
    };
    let records = run_sweep_with(cfg, opts)?;
    let mut csv = Vec::new();
    write_csv(&records, &mut csv)?;
    fs::write(out, csv).map_err(|e| io_err(out, e))?;
    let gp = plot_path(out);
    let mut plot = Vec::new();
    write_plot_data(&records, &mut plot)?;
    fs::write(&gp, plot).map_err(|e| io_err(&gp, e))?;
    let failed = records.iter().filter(|r| !r.usable()).count();
    Ok(format!(
        "csv={} plot={} records={} failed={failed}\n",
        out.display(),
        gp.display(),
        records.len()
    ))
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let cfg = SweepConfig {
        base: a.model.config(0),
        axis: a.axis,
        axis_values: a.values,
        trials: a.trials,
        methods: a.methods,
        master_seed: a.seed,
    };
    run_and_write(&cfg, &a.out, a.timing)
}

fn cmd_preset(a: PresetArgs) -> Outcome {
    let mut cfg = preset(&a.name)?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    run_and_write(&cfg, &a.out, a.timing)
}

fn cmd_slope(a: SlopeArgs) -> Outcome {
    let text = fs::read_to_string(&a.csv).map_err(|e| io_err(&a.csv, e))?;
    let records = jivelab::harness::parse_csv(&text)?;
    let fit = fit_loglog(&records, a.method)?;
    let points = records.iter().filter(|r| r.method == a.method && r.usable()).count();
    Ok(format!(
        "method={} slope={:.16e} intercept={:.16e} r_squared={:.16e} points={points}\n",
        a.method, fit.slope, fit.intercept, fit.r_squared
    ))
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let data = match &a.meta {
        Some(path) => {
            let meta = read_meta(path)?;
            match meta.get(COUNTEREXAMPLE_KEY) {
                Some(eps) => counterexample_stacked(
                    eps.parse()
                        .map_err(|_| JiveError::Parse(format!("meta `{COUNTEREXAMPLE_KEY}` has bad value `{eps}`")))?,
                )?,
                None => generate(&config_from_meta(&meta)?)?,
            }
        }
        None => generate(&a.model.config(a.seed))?,
    };
    let report = identifiability_check(data.truth.as_ref().expect("generated"));
    Ok(format!("{report}\n"))
}

fn cmd_moments(a: MomentsArgs) -> Outcome {
    let operands = random_operands(a.identity, a.n1, a.n2, a.seed)?;
    let report = mc_verify(a.identity, &operands, a.sigma, a.n1, a.n2, a.samples, a.seed)?;
    Ok(format!("{report}\n"))
}
