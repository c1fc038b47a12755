//! Shared-subspace estimators: AJIVE, the oracle-aided spectral estimator and
//! the stacked-SVD baseline.
//!
//! Per-matrix work runs through an index-ordered parallel map. Sums over the
//! K matrices are formed in fixed chunks of consecutive indices, each chunk
//! summed left to right and the chunk totals then added in order, so the
//! result does not depend on the number of threads.

use crate::error::{JiveError, Result};
use crate::matrixkit::{project_out, sym_eigen, top_left_singular, truncated_svd, Matrix, OrthonormalBasis};
use crate::model::Dataset;
use crate::par::try_map_indexed;

const SUM_CHUNK: usize = 32;

/// Relative size of the eigengap below which an estimate is flagged.
pub const GAP_TOL: f64 = 1e-12;

/// Per-matrix output of AJIVE's reconstruction step.
#[derive(Clone, Debug, PartialEq)]
pub struct PerMatrixFit {
    /// `A_kᵀÛ`, `d x r`.
    pub v_hat: Matrix,
    /// Top-`r_k` left singular basis of `(I - ÛÛᵀ)A_k`.
    pub u_k_hat: OrthonormalBasis,
    /// `A_kᵀÛ_k`, `d x r_k`.
    pub w_hat: Matrix,
    /// `ÛV̂ᵀ + Û_kŴᵀ`.
    pub a_hat: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub u_hat: OrthonormalBasis,
    /// Leading `r + 1` eigenvalues of the aggregated matrix (fewer when
    /// `r = n`), non-increasing.
    pub aggregate_eigenvalues: Vec<f64>,
    pub per_k: Option<Vec<PerMatrixFit>>,
    /// `λ_r` and `λ_{r+1}` coincide to within [`GAP_TOL`].
    pub degenerate_gap: bool,
}

impl Estimate {
    /// `λ_r - λ_{r+1}`, or `None` when `r = n`.
    pub fn gap(&self) -> Option<f64> {
        let r = self.u_hat.dim();
        self.aggregate_eigenvalues
            .get(r)
            .map(|next| self.aggregate_eigenvalues[r - 1] - next)
    }
}

/// Expands a rank list of length 1 to all K matrices and checks ranks.
fn unique_ranks(data: &Dataset, r: usize, r_k_list: &[usize]) -> Result<Vec<usize>> {
    let k = data.num_matrices();
    let ranks = match r_k_list.len() {
        1 => vec![r_k_list[0]; k],
        len if len == k => r_k_list.to_vec(),
        len => {
            return Err(JiveError::DimensionMismatch(format!(
                "{len} unique ranks for {k} matrices"
            )))
        }
    };
    let max = data.n().min(data.d());
    if r == 0 {
        return Err(JiveError::InvalidRank { k: 0, max });
    }
    for &rk in &ranks {
        if r + rk > max {
            return Err(JiveError::InvalidRank { k: r + rk, max });
        }
    }
    Ok(ranks)
}

/// `Σ_k f(k)` for `k < count`, reduced in fixed chunks (see module docs).
fn ordered_sum<F>(count: usize, dim: usize, f: F) -> Result<Matrix>
where
    F: Fn(usize) -> Result<Matrix> + Sync + Send,
{
    let chunks = count.div_ceil(SUM_CHUNK);
    let partials = try_map_indexed(chunks, |c| {
        let mut acc = Matrix::zeros(dim, dim);
        for k in c * SUM_CHUNK..((c + 1) * SUM_CHUNK).min(count) {
            acc.add_assign(&f(k)?)?;
        }
        Ok(acc)
    })?;
    let mut total = Matrix::zeros(dim, dim);
    for p in &partials {
        total.add_assign(p)?;
    }
    Ok(total)
}

/// Top-`r` eigenbasis of a symmetric aggregate plus the gap diagnostics.
fn leading_eigenspace(s: &Matrix, r: usize) -> Result<Estimate> {
    let n = s.rows();
    if r == 0 || r > n {
        return Err(JiveError::InvalidRank { k: r, max: n });
    }
    let eig = sym_eigen(s)?;
    let u_hat = OrthonormalBasis::new(eig.vectors.leading_columns(r))?;
    let values = eig.values[..(r + 1).min(n)].to_vec();
    let degenerate_gap = values
        .get(r)
        .is_some_and(|next| (values[r - 1] - next).abs() <= GAP_TOL * values[r - 1].abs().max(1.0));
    Ok(Estimate {
        u_hat,
        aggregate_eigenvalues: values,
        per_k: None,
        degenerate_gap,
    })
}

/// AJIVE: per-matrix top-`(r + r_k)` left singular bases `Ũ_k`, then the
/// top-`r` eigenvectors of `Σ ŨₖŨₖᵀ`. With `reconstruct`, also fits the
/// loadings and unique parts of every matrix.
pub fn ajive(data: &Dataset, r: usize, r_k_list: &[usize], reconstruct: bool) -> Result<Estimate> {
    let ranks = unique_ranks(data, r, r_k_list)?;
    let n = data.n();
    let aggregate = ordered_sum(data.num_matrices(), n, |k| {
        Ok(top_left_singular(&data.a[k], r + ranks[k])?.projector())
    })?;
    let mut est = leading_eigenspace(&aggregate, r)?;
    if reconstruct {
        let u_hat = est.u_hat.clone();
        let fits = try_map_indexed(data.num_matrices(), |k| {
            let a = &data.a[k];
            let v_hat = a.t_matmul(u_hat.mat())?;
            let residual = project_out(a, &u_hat)?;
            let u_k_hat = truncated_svd(&residual, ranks[k])?.left;
            let w_hat = a.t_matmul(u_k_hat.mat())?;
            let mut a_hat = u_hat.mat().matmul_t(&v_hat)?;
            a_hat.add_assign(&u_k_hat.mat().matmul_t(&w_hat)?)?;
            Ok(PerMatrixFit {
                v_hat,
                u_k_hat,
                w_hat,
                a_hat,
            })
        })?;
        est.per_k = Some(fits);
    }
    Ok(est)
}

/// Oracle-aided estimator: removes the best rank-`r_k` approximation of
/// `(I - U⋆U⋆ᵀ)A_k` from each `A_k`, then returns the top-`r` eigenvectors of
/// `M = (1/K) Σ (A_k - Û_kŴ_kᵀ)(A_k - Û_kŴ_kᵀ)ᵀ`.
pub fn oracle_estimate(data: &Dataset, r: usize, r_k_list: &[usize], u_star: &OrthonormalBasis) -> Result<Estimate> {
    let ranks = unique_ranks(data, r, r_k_list)?;
    let n = data.n();
    if u_star.ambient_dim() != n || u_star.dim() != r {
        return Err(JiveError::DimensionMismatch(format!(
            "oracle basis is {}x{}, expected {n}x{r}",
            u_star.ambient_dim(),
            u_star.dim()
        )));
    }
    let mut m = ordered_sum(data.num_matrices(), n, |k| {
        let a = &data.a[k];
        let unique = truncated_svd(&project_out(a, u_star)?, ranks[k])?.reconstruct();
        Ok(a.sub(&unique)?.gram_outer())
    })?;
    m.scale_mut(1.0 / data.num_matrices() as f64);
    leading_eigenspace(&m, r)
}

/// Stacked SVD: top-`r` left singular basis of `[A_1 ⋯ A_K]`, computed as the
/// top-`r` eigenvectors of `Σ A_kA_kᵀ`. The aggregate eigenvalues are the
/// squared singular values of the concatenation.
pub fn stacked_svd(data: &Dataset, r: usize) -> Result<Estimate> {
    let n = data.n();
    let max = n.min(data.d() * data.num_matrices());
    if r == 0 || r > max {
        return Err(JiveError::InvalidRank { k: r, max });
    }
    let gram = ordered_sum(data.num_matrices(), n, |k| Ok(data.a[k].gram_outer()))?;
    leading_eigenspace(&gram, r)
}

/// Stacked SVD through an explicit SVD of the concatenated matrix. Slower than
/// [`stacked_svd`]; kept as a cross-check.
pub fn stacked_svd_concat(data: &Dataset, r: usize) -> Result<OrthonormalBasis> {
    let blocks: Vec<&Matrix> = data.a.iter().collect();
    top_left_singular(&Matrix::hstack(&blocks)?, r)
}
