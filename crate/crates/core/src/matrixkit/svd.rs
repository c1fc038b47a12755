//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! For an `m x n` input with `m >= n` the columns are rotated pairwise until
//! they are mutually orthogonal; the column norms are then the singular values
//! and the normalised columns the left singular vectors. Wide inputs are
//! handled through the transpose. Singular values are sorted non-increasing
//! with a stable sort, so exactly tied values keep the order in which the
//! rotated columns ended up (lower original column index first).
//!
//! Each left/right vector pair is sign-normalised so that the largest-magnitude
//! entry of the left vector is positive.

use super::matrix::dot;
use super::{Matrix, OrthonormalBasis};
use crate::error::{JiveError, Result};

const MAX_SWEEPS: usize = 80;

#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    pub left: OrthonormalBasis,
    /// Non-increasing.
    pub singular_values: Vec<f64>,
    pub right: OrthonormalBasis,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `left · diag(s) · rightᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let mut scaled = self.left.mat().clone();
        let k = self.rank();
        for i in 0..scaled.rows() {
            for j in 0..k {
                scaled[(i, j)] *= self.singular_values[j];
            }
        }
        scaled.matmul_t(self.right.mat()).expect("consistent shapes")
    }
}

/// Rotates the columns in place until pairwise orthogonal. Returns the
/// accumulated right rotation when asked for.
fn orthogonalize_columns(cols: &mut [Vec<f64>], accumulate: bool) -> Result<Option<Vec<Vec<f64>>>> {
    let n = cols.len();
    let m = cols.first().map_or(0, |c| c.len());
    let mut v: Option<Vec<Vec<f64>>> = accumulate.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect()
    });
    let tol = f64::EPSILON * (m.max(1) as f64).sqrt();
    let mut norms: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        // Columns at roundoff level relative to the largest carry no signal and
        // can never be made orthogonal to it in relative terms; leave them be.
        let top = norms.iter().copied().fold(0.0, f64::max);
        let negligible = top * (f64::EPSILON * m as f64).powi(2);
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                // exact update of the squared norms under the rotation
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
                if let Some(v) = v.as_mut() {
                    let (lo, hi) = v.split_at_mut(q);
                    rotate(&mut lo[p], &mut hi[0], c, s);
                }
            }
        }
        // refresh to stop drift in the running norms
        for (nrm, c) in norms.iter_mut().zip(cols.iter()) {
            *nrm = dot(c, c);
        }
        if !rotated {
            return Ok(v);
        }
    }
    Err(JiveError::NoConvergence("one-sided Jacobi SVD"))
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Replaces unusable vectors (flagged `false`) by deterministic completions and
/// re-orthonormalises everything by two passes of modified Gram–Schmidt.
///
/// A completion is the standard basis vector with the largest residual against
/// the vectors already placed (lowest index on ties). With `j < dim` vectors
/// placed that residual is at least `sqrt((dim - j) / dim)`, so it never
/// vanishes.
fn finish_orthonormal(vecs: &mut [Vec<f64>], usable: &[bool]) {
    let dim = vecs.first().map_or(0, |v| v.len());
    for j in 0..vecs.len() {
        if usable[j] {
            let (lo, hi) = vecs.split_at_mut(j);
            let nrm = project_out_twice(&mut hi[0], lo);
            if nrm > 0.5 {
                hi[0].iter_mut().for_each(|a| *a /= nrm);
                continue;
            }
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        for t in 0..dim {
            let mut e = vec![0.0; dim];
            e[t] = 1.0;
            let nrm = project_out_twice(&mut e, &vecs[..j]);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, e));
            }
        }
        let (nrm, mut e) = best.expect("dimension is positive");
        e.iter_mut().for_each(|a| *a /= nrm);
        vecs[j] = e;
    }
}

/// Removes the components of `x` along the orthonormal `basis`, twice, and
/// returns the remaining norm.
fn project_out_twice(x: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let proj = dot(b, x);
            for (a, bb) in x.iter_mut().zip(b) {
                *a -= proj * bb;
            }
        }
    }
    dot(x, x).sqrt()
}

fn sign_normalize(left: &mut [f64], right: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in left.iter().enumerate() {
        if x.abs() > left[best].abs() {
            best = i;
        }
    }
    if left.get(best).is_some_and(|x| *x < 0.0) {
        left.iter_mut().for_each(|x| *x = -*x);
        right.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Left vectors, singular values, right vectors.
type Triplets = (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>);

/// Full thin SVD, `min(m, n)` triplets, sorted.
fn thin_svd(m: &Matrix) -> Result<Triplets> {
    m.ensure_finite()?;
    let (rows, cols) = m.shape();
    let tall = rows >= cols;
    let mut work = if tall {
        m.to_columns()
    } else {
        m.transpose().to_columns()
    };
    let long = if tall { rows } else { cols };
    let rot = orthogonalize_columns(&mut work, true)?.expect("accumulated");

    let sigma: Vec<f64> = work.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let smax = order.first().map_or(0.0, |&i| sigma[i]);
    let cutoff = smax * f64::EPSILON * (rows.max(cols) as f64) * 4.0;

    let mut normalized: Vec<Vec<f64>> = Vec::with_capacity(order.len());
    let mut usable = Vec::with_capacity(order.len());
    let mut rotations: Vec<Vec<f64>> = Vec::with_capacity(order.len());
    let mut values = Vec::with_capacity(order.len());
    for &j in &order {
        let s = sigma[j];
        let ok = s > cutoff && s > 0.0;
        usable.push(ok);
        normalized.push(if ok {
            work[j].iter().map(|x| x / s).collect()
        } else {
            vec![0.0; long]
        });
        rotations.push(rot[j].clone());
        values.push(s);
    }
    finish_orthonormal(&mut normalized, &usable);

    let (mut left, mut right) = if tall {
        (normalized, rotations)
    } else {
        (rotations, normalized)
    };
    for (l, r) in left.iter_mut().zip(right.iter_mut()) {
        sign_normalize(l, r);
    }
    Ok((left, values, right))
}

/// Top-`k` singular triplets of `m`.
pub fn truncated_svd(m: &Matrix, k: usize) -> Result<TruncatedSvd> {
    let max = m.rows().min(m.cols());
    if k == 0 || k > max {
        return Err(JiveError::InvalidRank { k, max });
    }
    let (left, values, right) = thin_svd(m)?;
    let left = Matrix::from_columns(m.rows(), &left[..k]);
    let right = Matrix::from_columns(m.cols(), &right[..k]);
    Ok(TruncatedSvd {
        left: OrthonormalBasis::from_matrix_unchecked(left),
        singular_values: values[..k].to_vec(),
        right: OrthonormalBasis::from_matrix_unchecked(right),
    })
}

/// Top-`k` left singular basis only.
pub fn top_left_singular(m: &Matrix, k: usize) -> Result<OrthonormalBasis> {
    Ok(truncated_svd(m, k)?.left)
}

/// All `min(m, n)` singular values, non-increasing.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    m.ensure_finite()?;
    let mut work = if m.rows() >= m.cols() {
        m.to_columns()
    } else {
        m.transpose().to_columns()
    };
    orthogonalize_columns(&mut work, false)?;
    let mut s: Vec<f64> = work.iter().map(|c| dot(c, c).sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Operator 2-norm `σ₁(m)`; 0 for an empty or zero matrix.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    singular_values(m)
        .map(|s| s[0])
        .expect("Jacobi SVD converges on finite input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn gaussian(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut s = Stream::new(seed);
        let mut d = vec![0.0; rows * cols];
        s.fill_normal(&mut d, 1.0);
        Matrix::new(rows, cols, d).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let svd = truncated_svd(&Matrix::diag(&[3.0, 2.0, 1.0]), 2).unwrap();
        assert_eq!(svd.singular_values, vec![3.0, 2.0]);
        assert_eq!(svd.left.mat(), OrthonormalBasis::standard(3, 2).mat());
    }

    #[test]
    fn rank_one_outer_product() {
        let u = [0.6, 0.0, -0.8];
        let v = [0.0, 1.0];
        let m = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let svd = truncated_svd(&m, 1).unwrap();
        assert!((svd.singular_values[0] - 1.0).abs() < 1e-15);
        let l = svd.left.mat().col(0);
        let sign = -l[2].signum();
        for i in 0..3 {
            assert!((l[i] - sign * u[i]).abs() < 1e-15);
        }
        // largest-magnitude entry is made positive
        assert!(l[2] > 0.0);
    }

    #[test]
    fn invalid_rank() {
        let m = Matrix::identity(3);
        assert!(matches!(truncated_svd(&m, 0), Err(JiveError::InvalidRank { .. })));
        assert!(matches!(truncated_svd(&m, 4), Err(JiveError::InvalidRank { .. })));
    }

    #[test]
    fn wide_and_tall_reconstruct() {
        for (r, c) in [(7, 4), (4, 7), (5, 5)] {
            let m = gaussian(r, c, (r * 10 + c) as u64);
            let svd = truncated_svd(&m, r.min(c)).unwrap();
            assert!(svd.reconstruct().max_abs_diff(&m).unwrap() < 1e-12);
            assert!(svd.left.mat().orthonormality_defect() < 1e-13);
            assert!(svd.right.mat().orthonormality_defect() < 1e-13);
        }
    }

    #[test]
    fn rank_deficient_left_basis_is_completed() {
        // rank 1, asking for 2 left vectors
        let m = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]).unwrap();
        let svd = truncated_svd(&m, 2).unwrap();
        assert!(svd.singular_values[1].abs() < 1e-15);
        assert!(svd.left.mat().orthonormality_defect() < 1e-14);
        assert!(svd.right.mat().orthonormality_defect() < 1e-14);
        assert!(truncated_svd(&Matrix::zeros(3, 2), 2).is_ok());
    }

    #[test]
    fn spectral_norm_basics() {
        assert_eq!(spectral_norm(&Matrix::diag(&[3.0, 2.0])), 3.0);
        assert_eq!(spectral_norm(&Matrix::zeros(4, 3)), 0.0);
        // top right singular vector orthogonal to the all-ones vector
        let m = Matrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]).unwrap();
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-15);
        let g = gaussian(9, 4, 5);
        assert!((spectral_norm(&g) - spectral_norm(&g.transpose())).abs() < 1e-12);
    }

    #[test]
    fn completes_nearly_full_deficient_basis() {
        // rank one in R^20: 19 completions, where a fixed residual threshold
        // would run out of candidates
        let u: Vec<f64> = (0..20).map(|i| 1.0 + i as f64).collect();
        let m = Matrix::from_fn(20, 20, |i, j| u[i] * u[j]);
        let svd = truncated_svd(&m, 20).unwrap();
        assert!(svd.left.mat().orthonormality_defect() < 1e-12);
        assert!(svd.right.mat().orthonormality_defect() < 1e-12);
        assert!(
            truncated_svd(&Matrix::zeros(5, 5), 5)
                .unwrap()
                .left
                .mat()
                .orthonormality_defect()
                < 1e-12
        );
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Matrix::identity(2);
        m[(1, 0)] = f64::NAN;
        assert!(matches!(
            truncated_svd(&m, 1),
            Err(JiveError::NonFinite { row: 1, col: 0 })
        ));
        assert!(singular_values(&m).is_err());
    }
}
