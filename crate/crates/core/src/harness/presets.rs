use super::{Axis, Method, SweepConfig};
use crate::error::{JiveError, Result};
use crate::model::{JiveConfig, LoadingScheme, MisalignScheme};

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 9] = [
    "fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig5a", "fig5b",
];

const GRID_POINTS: usize = 8;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_SEED: u64 = 20_240_601;

/// `points` log-spaced values from `lo` to `hi`, both included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// Log grid rounded to multiples of `step`, duplicates removed.
fn integer_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out: Vec<f64> = log_grid(lo, hi, GRID_POINTS)
        .into_iter()
        .map(|v| ((v / step).round() * step).max(step))
        .collect();
    out.dedup();
    out
}

/// The sweep behind one of the named figure panels.
///
/// | name  | axis  | range          | notes                                   |
/// |-------|-------|----------------|-----------------------------------------|
/// | fig1a | n     | 16 to 400      | θ = 1/2, K = 100, σ = 1e-3              |
/// | fig1b | K     | 25 to 10000    | θ = 1/2, n = 20, σ = 1e-3               |
/// | fig2a | n     | 16 to 400      | θ = 1e-4, K = 100, σ = 1e-6             |
/// | fig2b | K     | 25 to 10000    | θ = 1e-4, n = 20, σ = 1e-6              |
/// | fig2c | theta | 1e-4 to 1e-2   | n = 20, K = 100, σ = 1e-6               |
/// | fig3a | K     | 25 to 10000    | shared loading, σ = 0.01, θ = 1/2       |
/// | fig3b | K     | 26 to 10000    | oracle-hard loading, two-group, σ = 0.1, oracle estimator |
/// | fig5a | d     | 10 to 400      | σ = 1e-3, n = 20, K = 100               |
/// | fig5b | sigma | 1e-6 to 1e-3   | d = 20, n = 20, K = 100                 |
///
/// Every grid has 8 log-spaced points; integer axes are rounded (to even
/// numbers for fig3b, whose two-group construction needs even K). Unless
/// noted, d = 20, r = r_k = 2, γ = 0.5, random loadings, randomized
/// misalignment and the AJIVE estimator.
pub fn preset(name: &str) -> Result<SweepConfig> {
    let base = JiveConfig {
        n: 20,
        d: 20,
        num_matrices: 100,
        r: 2,
        r_k: 2,
        theta: 0.5,
        sigma: 1e-3,
        gamma: 0.5,
        misalign_scheme: MisalignScheme::Randomized,
        loading_scheme: LoadingScheme::Random,
        seed: 0,
    };
    let small_theta = JiveConfig {
        theta: 1e-4,
        sigma: 1e-6,
        ..base.clone()
    };
    let (base, axis, values, methods) = match name {
        "fig1a" => (base, Axis::N, integer_grid(16.0, 400.0, 1.0), vec![Method::Ajive]),
        "fig1b" => (base, Axis::K, integer_grid(25.0, 10_000.0, 1.0), vec![Method::Ajive]),
        "fig2a" => (
            small_theta,
            Axis::N,
            integer_grid(16.0, 400.0, 1.0),
            vec![Method::Ajive],
        ),
        "fig2b" => (
            small_theta,
            Axis::K,
            integer_grid(25.0, 10_000.0, 1.0),
            vec![Method::Ajive],
        ),
        "fig2c" => (
            small_theta,
            Axis::Theta,
            log_grid(1e-4, 1e-2, GRID_POINTS),
            vec![Method::Ajive],
        ),
        "fig3a" => (
            JiveConfig {
                sigma: 0.01,
                loading_scheme: LoadingScheme::Shared,
                ..base
            },
            Axis::K,
            integer_grid(25.0, 10_000.0, 1.0),
            vec![Method::Ajive],
        ),
        "fig3b" => (
            JiveConfig {
                sigma: 0.1,
                loading_scheme: LoadingScheme::OracleHard,
                misalign_scheme: MisalignScheme::TwoGroup,
                ..base
            },
            Axis::K,
            integer_grid(25.0, 10_000.0, 2.0),
            vec![Method::Oracle],
        ),
        "fig5a" => (base, Axis::D, integer_grid(10.0, 400.0, 1.0), vec![Method::Ajive]),
        "fig5b" => (
            base,
            Axis::Sigma,
            log_grid(1e-6, 1e-3, GRID_POINTS),
            vec![Method::Ajive],
        ),
        other => return Err(JiveError::UnknownPreset(other.to_string())),
    };
    Ok(SweepConfig {
        base,
        axis,
        axis_values: values,
        trials: DEFAULT_TRIALS,
        methods,
        master_seed: DEFAULT_SEED,
    })
}
