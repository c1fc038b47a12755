//! Subspace distances, misalignment, identifiability diagnostics and
//! evaluable rate formulas.
//!
//! The rate evaluators set every unspecified constant to 1 and use natural
//! logarithms. They describe how errors scale, not their absolute size, so
//! they are meant for slope comparisons only.

use std::fmt;

use crate::error::{JiveError, Result};
use crate::matrixkit::{singular_values, spectral_norm, sym_eigen, top_left_singular, Matrix, OrthonormalBasis};
use crate::model::GroundTruth;

/// `‖aaᵀ - bbᵀ‖`, the sine of the largest principal angle when the dimensions
/// agree.
///
/// Computed as `max(‖(I - bbᵀ)a‖, ‖(I - aaᵀ)b‖)`, which equals the projector
/// difference norm for any pair of orthogonal projectors and stays accurate
/// for tiny angles, where forming `aaᵀ - bbᵀ` would cancel catastrophically.
pub fn subspace_error(a: &OrthonormalBasis, b: &OrthonormalBasis) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(JiveError::DimensionMismatch(format!(
            "bases live in R^{} and R^{}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    let residual = |x: &OrthonormalBasis, y: &OrthonormalBasis| -> Result<f64> {
        let mut r = x.mat().clone();
        r.axpy(-1.0, &y.mat().matmul(&y.mat().t_matmul(x.mat())?)?)?;
        Ok(spectral_norm(&r))
    };
    let e = residual(a, b)?.max(residual(b, a)?);
    Ok(e.min(1.0))
}

/// `(1/K) Σ UₖUₖᵀ`, summed in index order.
pub fn average_projector(u_list: &[OrthonormalBasis]) -> Result<Matrix> {
    let first = u_list.first().ok_or(JiveError::EmptyList)?;
    let n = first.ambient_dim();
    let mut acc = Matrix::zeros(n, n);
    for u in u_list {
        if u.ambient_dim() != n {
            return Err(JiveError::DimensionMismatch(format!(
                "subspaces live in R^{n} and R^{}",
                u.ambient_dim()
            )));
        }
        acc.add_assign(&u.projector())?;
    }
    acc.scale_mut(1.0 / u_list.len() as f64);
    Ok(acc)
}

/// `1 - ‖(1/K) Σ UₖUₖᵀ‖`, clamped below at 0. The average projector is
/// positive semidefinite, so its norm is its largest eigenvalue.
pub fn misalignment(u_list: &[OrthonormalBasis]) -> Result<f64> {
    let avg = average_projector(u_list)?;
    let top = sym_eigen(&avg)?.values.first().copied().unwrap_or(0.0);
    Ok((1.0 - top).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub value: f64,
    pub pass: bool,
}

/// Outcome of the identifiability conditions on a ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentifiabilityReport {
    /// `min_k σ_{r+r_k}(A_k⋆)`, must be at least `1e-8`.
    pub faithfulness: Verdict,
    /// `max_k ‖(I - P_k)U⋆‖` with `P_k` the projector onto `col(A_k⋆)`.
    pub containment: Verdict,
    /// Misalignment of the unique subspaces, must exceed `1e-10`.
    pub exhaustiveness: Verdict,
    /// `max_k |U_kᵀU⋆|`, must be at most `1e-10`.
    pub orthogonality: Verdict,
}

impl IdentifiabilityReport {
    pub fn all_pass(&self) -> bool {
        self.faithfulness.pass && self.containment.pass && self.exhaustiveness.pass && self.orthogonality.pass
    }
}

impl fmt::Display for IdentifiabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("faithfulness", self.faithfulness),
            ("containment", self.containment),
            ("exhaustiveness", self.exhaustiveness),
            ("orthogonality", self.orthogonality),
        ];
        for (name, v) in rows {
            writeln!(f, "{name}={} {name}_value={:.16e}", pass_word(v.pass), v.value)?;
        }
        write!(f, "identifiable={}", pass_word(self.all_pass()))
    }
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "fail"
    }
}

/// Checks the identifiability conditions. Never fails: anything that cannot
/// be evaluated is reported as a failing verdict.
pub fn identifiability_check(truth: &GroundTruth) -> IdentifiabilityReport {
    let r = truth.u_star.dim();
    let mut min_sigma = f64::INFINITY;
    let mut containment = 0.0_f64;
    let mut orthogonality = 0.0_f64;
    for (k, a) in truth.a_star.iter().enumerate() {
        let rank = r + truth.u_k[k].dim();
        let sv = singular_values(a).unwrap_or_default();
        min_sigma = min_sigma.min(sv.get(rank - 1).copied().unwrap_or(0.0));
        let resid = top_left_singular(a, rank)
            .and_then(|p| crate::matrixkit::project_out(truth.u_star.mat(), &p))
            .map(|m| spectral_norm(&m))
            .unwrap_or(f64::INFINITY);
        containment = containment.max(resid);
        let cross = truth.u_k[k]
            .mat()
            .t_matmul(truth.u_star.mat())
            .map(|m| m.max_abs())
            .unwrap_or(f64::INFINITY);
        orthogonality = orthogonality.max(cross);
    }
    if truth.a_star.is_empty() {
        min_sigma = 0.0;
    }
    let theta = misalignment(&truth.u_k).unwrap_or(0.0);
    IdentifiabilityReport {
        faithfulness: Verdict {
            value: min_sigma,
            pass: min_sigma >= 1e-8,
        },
        containment: Verdict {
            value: containment,
            pass: containment <= 1e-8,
        },
        exhaustiveness: Verdict {
            value: theta,
            pass: theta > 1e-10,
        },
        orthogonality: Verdict {
            value: orthogonality,
            pass: orthogonality <= 1e-10,
        },
    }
}

/// Parameters of the rate formulas. `num_matrices` is K.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateInputs {
    pub n: f64,
    pub d: f64,
    pub num_matrices: f64,
    pub r: f64,
    pub r_avg: f64,
    pub theta: f64,
    pub sigma: f64,
    pub sigma_min: f64,
    pub kappa: f64,
}

impl RateInputs {
    /// `N = max(n, d)`.
    pub fn big_n(&self) -> f64 {
        self.n.max(self.d)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n),
            ("d", self.d),
            ("K", self.num_matrices),
            ("r", self.r),
            ("r_avg", self.r_avg),
            ("sigma_min", self.sigma_min),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(JiveError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(JiveError::InvalidConfig(format!(
                "theta must lie in (0, 1], got {}",
                self.theta
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(JiveError::InvalidConfig(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        if self.kappa.is_nan() || self.kappa < 1.0 {
            return Err(JiveError::InvalidConfig(format!(
                "kappa must be at least 1, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// First-order term `(σ/σ_min) √(n/K + r/(Kθ))`.
pub fn bound_first_order(ri: &RateInputs) -> f64 {
    let k = ri.num_matrices;
    ri.sigma / ri.sigma_min * (ri.n / k + ri.r / (k * ri.theta)).sqrt()
}

/// Second-order term `σ²n / (σ_min² θ (1 ∧ Kθ))`.
pub fn bound_second_order(ri: &RateInputs) -> f64 {
    let snr2 = (ri.sigma / ri.sigma_min).powi(2);
    snr2 * ri.n / (ri.theta * (ri.num_matrices * ri.theta).min(1.0))
}

/// Full AJIVE upper bound with unit constant:
///
/// ```text
/// log^{5/2}N · [ (σ/σ_min) √(n/K + (r+r_avg)/(Kθ) + min(r·r_avg/(Kθ), r/(K²θ²)))
///               + (σ²/σ_min²) κ²/(θ(1 ∧ Kθ)) (√(nd) + n) ]
/// ```
pub fn bound_theorem1(ri: &RateInputs) -> f64 {
    let k = ri.num_matrices;
    let kt = k * ri.theta;
    let inner = ri.n / k + (ri.r + ri.r_avg) / kt + (ri.r * ri.r_avg / kt).min(ri.r / (kt * kt));
    let first = ri.sigma / ri.sigma_min * inner.sqrt();
    let second =
        (ri.sigma / ri.sigma_min).powi(2) * ri.kappa.powi(2) / (ri.theta * kt.min(1.0)) * ((ri.n * ri.d).sqrt() + ri.n);
    ri.big_n().ln().powf(2.5) * (first + second)
}

/// Minimax lower bound
/// `(σ/(20σ_min)) √(n/K + r/(Kθ)) + (σ²/(50σ_min²)) √(nd/K + rd/(Kθ))`.
pub fn minimax_lower(ri: &RateInputs) -> f64 {
    let k = ri.num_matrices;
    let kt = k * ri.theta;
    let snr = ri.sigma / ri.sigma_min;
    snr / 20.0 * (ri.n / k + ri.r / kt).sqrt() + snr * snr / 50.0 * (ri.n * ri.d / k + ri.r * ri.d / kt).sqrt()
}

/// Lower bound for the oracle estimator with unit constants, floored at 0:
/// `σ⁴nd/σ_min⁴ - (ln N/√K) σ√N/σ_min`. Order of magnitude only.
pub fn oracle_lower(ri: &RateInputs) -> f64 {
    let snr = ri.sigma / ri.sigma_min;
    let n_big = ri.big_n();
    let plateau = snr.powi(4) * ri.n * ri.d;
    let decay = n_big.ln() / ri.num_matrices.sqrt() * snr * n_big.sqrt();
    (plateau - decay).max(0.0)
}
