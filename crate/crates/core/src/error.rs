use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical layer, the bound calculus and the transforms.
#[derive(Debug, Clone, Error)]
pub enum BiframeError {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("{routine} did not converge after {sweeps} sweeps")]
    NoConvergence { routine: &'static str, sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pair operator is not Hermitian (defect {defect:.3e}); the middle sum takes non-real values")]
    NonHermitianForm {
        defect: f64,
        /// A vector `x` with `Im(x^H G x) != 0`.
        witness: Vec<Complex64>,
        imaginary_part: f64,
    },

    #[error("K must be nonzero on the domain of the inequality")]
    DegenerateK,

    #[error("subspace is trivial")]
    TrivialSubspace,

    #[error("KLK != K (residual {residual:.3e})")]
    InnerInverseViolated { residual: f64 },

    #[error("input pair is not a K-biframe")]
    NotAKBiframe,

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not EP")]
    NotEP,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl BiframeError {
    /// Stable identifier used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            BiframeError::NotHermitian { .. } => "NotHermitian",
            BiframeError::NoConvergence { .. } => "NoConvergence",
            BiframeError::DimensionMismatch(_) => "DimensionMismatch",
            BiframeError::NonHermitianForm { .. } => "NonHermitianForm",
            BiframeError::DegenerateK => "DegenerateK",
            BiframeError::TrivialSubspace => "TrivialSubspace",
            BiframeError::InnerInverseViolated { .. } => "InnerInverseViolated",
            BiframeError::NotAKBiframe => "NotAKBiframe",
            BiframeError::NotUnitary { .. } => "NotUnitary",
            BiframeError::NotEP => "NotEP",
            BiframeError::HypothesisViolated(_) => "HypothesisViolated",
            BiframeError::GenerationFailed(_) => "GenerationFailed",
            BiframeError::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, BiframeError>;
