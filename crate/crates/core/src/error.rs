use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EtsError {
    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("stable exponent out of range: alpha = {0} must lie in (0, 2)")]
    StableExponentOutOfRange(f64),

    #[error("measure has an atom on the sphere at infinity where only finite atoms are allowed")]
    InfiniteRadiusAtom,

    #[error("a stable part is only allowed for alpha in (0, 2), got alpha = {0}")]
    StablePartForbidden(f64),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric positive semidefinite: {0}")]
    NotPsd(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl EtsError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        EtsError::InvalidInput(msg.into())
    }

    /// True for errors caused by numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            EtsError::QuadratureFailure { .. } | EtsError::DivergentIntegral(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, EtsError>;
