//! Shared-subspace estimation under the JIVE model.
//!
//! Each of K observed `n x d` matrices is `A_k = U⋆V_kᵀ + U_kW_kᵀ + E_k`: a
//! component in a common `r`-dimensional column space `col(U⋆)`, a component
//! in a matrix-specific space orthogonal to it, and Gaussian noise. The crate
//! provides
//!
//! * [`matrixkit`]: dense QR, SVD and symmetric eigen kernels;
//! * [`model`]: instance generators with controlled misalignment;
//! * [`estimators`]: AJIVE, an oracle-aided estimator and stacked SVD;
//! * [`metrics`]: subspace distance, misalignment and rate formulas;
//! * [`momentlab`]: Monte-Carlo checks of Gaussian moment identities;
//! * [`harness`]: deterministic parameter sweeps with CSV output.
//!
//! With the default `parallel` feature, per-matrix work and sweep cells run on
//! rayon; without it everything runs sequentially. Results are identical
//! either way.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod matrixkit;
pub mod metrics;
pub mod model;
pub mod momentlab;
mod par;
pub mod rng;

pub use error::{JiveError, Result};
pub use matrixkit::{Matrix, OrthonormalBasis};
