use super::{Matrix, OrthonormalBasis};
use crate::error::{JiveError, Result};

/// Relative threshold on the diagonal of `R` below which the input is treated
/// as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Thin Householder QR, returning the orthonormal factor.
///
/// The diagonal of `R` is made nonnegative by flipping column signs of `Q`, so
/// the output is a deterministic function of the input.
pub fn qr_orthonormalize(m: &Matrix) -> Result<OrthonormalBasis> {
    let (q, _) = thin_qr(m)?;
    Ok(q)
}

/// Thin QR `m = Q R` with `diag(R) >= 0`.
pub fn thin_qr(m: &Matrix) -> Result<(OrthonormalBasis, Matrix)> {
    let (n, k) = m.shape();
    if k > n {
        return Err(JiveError::RankDeficient { min: 0.0, max: 0.0 });
    }
    let mut cols = m.to_columns();
    // Householder vectors, stored from row j downwards.
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = Matrix::zeros(k, k);

    for j in 0..k {
        let x = &cols[j][j..];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|a| a * a).sum();
        if vnorm2 > 0.0 {
            let inv = 1.0 / vnorm2.sqrt();
            v.iter_mut().for_each(|a| *a *= inv);
            for col in cols.iter_mut().skip(j + 1) {
                let tail = &mut col[j..];
                let s = 2.0 * super::matrix::dot(&v, tail);
                for (t, vi) in tail.iter_mut().zip(&v) {
                    *t -= s * vi;
                }
            }
        } else {
            v.iter_mut().for_each(|a| *a = 0.0);
        }
        r[(j, j)] = alpha;
        for l in j + 1..k {
            r[(j, l)] = cols[l][j];
        }
        reflectors.push(v);
    }

    let diag: Vec<f64> = (0..k).map(|j| r[(j, j)].abs()).collect();
    let max = diag.iter().copied().fold(0.0_f64, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    if k > 0 && (max == 0.0 || min < RANK_TOL * max) {
        return Err(JiveError::RankDeficient { min, max });
    }

    // Q = H_0 H_1 ⋯ H_{k-1} [I_k; 0]
    let mut q_cols: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for q in q_cols.iter_mut() {
        for (j, v) in reflectors.iter().enumerate().rev() {
            let tail = &mut q[j..];
            let s = 2.0 * super::matrix::dot(v, tail);
            if s != 0.0 {
                for (t, vi) in tail.iter_mut().zip(v) {
                    *t -= s * vi;
                }
            }
        }
    }
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q_cols[j].iter_mut().for_each(|x| *x = -*x);
            for l in j..k {
                r[(j, l)] = -r[(j, l)];
            }
        }
    }
    let q = Matrix::from_columns(n, &q_cols);
    Ok((OrthonormalBasis::from_matrix_unchecked(q), r))
}
