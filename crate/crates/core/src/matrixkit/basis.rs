use super::Matrix;
use crate::error::{JiveError, Result};

/// Tolerance on `max |BᵀB - I|` for a matrix to count as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// An `n x k` matrix with orthonormal columns, standing for its column space.
#[derive(Clone, PartialEq, Debug)]
pub struct OrthonormalBasis {
    mat: Matrix,
}

impl OrthonormalBasis {
    pub fn new(mat: Matrix) -> Result<Self> {
        if mat.cols() > mat.rows() {
            return Err(JiveError::DimensionMismatch(format!(
                "{} orthonormal columns cannot live in R^{}",
                mat.cols(),
                mat.rows()
            )));
        }
        let defect = mat.orthonormality_defect();
        if defect > ORTHONORMAL_TOL {
            return Err(JiveError::NotOrthonormal(defect));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: Matrix) -> Self {
        debug_assert!(
            mat.orthonormality_defect() <= ORTHONORMAL_TOL,
            "defect {}",
            mat.orthonormality_defect()
        );
        Self { mat }
    }

    /// The first `k` columns of the `n x n` identity.
    pub fn standard(n: usize, k: usize) -> Self {
        Self {
            mat: Matrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 }),
        }
    }

    #[inline]
    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    /// Ambient dimension.
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.mat.rows()
    }

    /// Subspace dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.cols()
    }

    /// Orthogonal projector `BBᵀ`.
    pub fn projector(&self) -> Matrix {
        self.mat.gram_outer()
    }

    /// Right rotation `B Q` by an orthogonal `Q`; the span is unchanged.
    pub fn rotated(&self, q: &Matrix) -> Result<Self> {
        Self::new(self.mat.matmul(q)?)
    }

    /// The first `k` columns.
    pub fn leading(&self, k: usize) -> Self {
        Self {
            mat: self.mat.leading_columns(k),
        }
    }

    /// Columns of `self` followed by those of `other`, provided the result is
    /// still orthonormal.
    pub fn concat(&self, other: &OrthonormalBasis) -> Result<Self> {
        Self::new(Matrix::hstack(&[&self.mat, &other.mat])?)
    }
}
