//! Dense linear-algebra kernels: a row-major matrix, orthonormal bases,
//! Householder QR, Jacobi SVD and a symmetric eigensolver.

mod basis;
mod eigen;
mod matrix;
mod qr;
mod svd;

pub use basis::{OrthonormalBasis, ORTHONORMAL_TOL};
pub use eigen::{sym_eigen, sym_top_eigvecs, SymEigen, SYMMETRY_TOL};
pub use matrix::Matrix;
pub use qr::{qr_orthonormalize, thin_qr, RANK_TOL};
pub use svd::{singular_values, spectral_norm, top_left_singular, truncated_svd, TruncatedSvd};

use crate::error::{JiveError, Result};

/// `(I - bbᵀ) m`.
pub fn project_out(m: &Matrix, b: &OrthonormalBasis) -> Result<Matrix> {
    if b.ambient_dim() != m.rows() {
        return Err(JiveError::DimensionMismatch(format!(
            "basis lives in R^{} but matrix has {} rows",
            b.ambient_dim(),
            m.rows()
        )));
    }
    let coeffs = b.mat().t_matmul(m)?;
    let mut out = m.clone();
    out.axpy(-1.0, &b.mat().matmul(&coeffs)?)?;
    Ok(out)
}
