use thiserror::Error;

pub type Result<T> = std::result::Result<T, JiveError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JiveError {
    #[error("matrix is numerically rank deficient (min |R_ii| = {min:e}, max |R_ii| = {max:e})")]
    RankDeficient { min: f64, max: f64 },

    #[error("requested rank {k} is outside [1, {max}]")]
    InvalidRank { k: usize, max: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("columns are not orthonormal (max |BᵀB - I| = {0:e})")]
    NotOrthonormal(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested {requested} columns but only {available} directions are available")]
    DimensionOverflow { requested: usize, available: usize },

    #[error("two-group misalignment needs an even number of matrices, got K = {0}")]
    OddK(usize),

    #[error("loading scheme constraint violated: {0}")]
    SchemeConstraint(String),

    #[error("theta = 0 makes the shared subspace unidentifiable")]
    ZeroMisalignment,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("empty list of subspaces")]
    EmptyList,

    #[error("unknown moment identity `{0}`")]
    UnknownIdentity(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("need at least {needed} usable records, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("log-log fit needs positive values, got {0:e}")]
    NonpositiveError(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl JiveError {
    /// Errors caused by bad user input rather than by a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            JiveError::InvalidRank { .. }
                | JiveError::DimensionMismatch(_)
                | JiveError::DimensionOverflow { .. }
                | JiveError::OddK(_)
                | JiveError::SchemeConstraint(_)
                | JiveError::ZeroMisalignment
                | JiveError::InvalidConfig(_)
                | JiveError::UnknownIdentity(_)
                | JiveError::UnknownPreset(_)
                | JiveError::Parse(_)
                | JiveError::Io(_)
        )
    }

    /// Short machine-readable tag, used for failed sweep cells.
    pub fn tag(&self) -> &'static str {
        match self {
            JiveError::RankDeficient { .. } => "rank_deficient",
            JiveError::InvalidRank { .. } => "invalid_rank",
            JiveError::NotSquare { .. } => "not_square",
            JiveError::NotSymmetric(_) => "not_symmetric",
            JiveError::NotOrthonormal(_) => "not_orthonormal",
            JiveError::DimensionMismatch(_) => "dimension_mismatch",
            JiveError::DimensionOverflow { .. } => "dimension_overflow",
            JiveError::OddK(_) => "odd_k",
            JiveError::SchemeConstraint(_) => "scheme_constraint",
            JiveError::ZeroMisalignment => "zero_misalignment",
            JiveError::InvalidConfig(_) => "invalid_config",
            JiveError::NonFinite { .. } => "non_finite",
            JiveError::NoConvergence(_) => "no_convergence",
            JiveError::EmptyList => "empty_list",
            JiveError::UnknownIdentity(_) => "unknown_identity",
            JiveError::UnknownPreset(_) => "unknown_preset",
            JiveError::InsufficientData { .. } => "insufficient_data",
            JiveError::NonpositiveError(_) => "nonpositive_error",
            JiveError::Parse(_) => "parse",
            JiveError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for JiveError {
    fn from(e: std::io::Error) -> Self {
        JiveError::Io(e.to_string())
    }
}
