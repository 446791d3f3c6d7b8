use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Fock dimension {dim} too small (need at least {min})")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error(
        "truncation tail {tail:.3e} exceeds tolerance {tolerance:.3e} at dimension {dim}; \
         need at least {required_dim}"
    )]
    TruncationTail {
        dim: usize,
        tail: f64,
        tolerance: f64,
        required_dim: usize,
    },

    #[error("degenerate star product: resummation denominator 1 - {coupling} vanishes")]
    DegenerateStar { coupling: Complex64 },

    #[error("degenerate composition: Lambda = {lambda} is zero within tolerance")]
    DegenerateComposition { lambda: Complex64 },

    #[error("non-integrable Gaussian: {reason}")]
    NonIntegrable { reason: String },

    #[error("quadrature tail bound violated: radius {radius} needs to be at least {required}")]
    QuadratureTail { radius: f64, required: f64 },

    #[error("quadrature did not reach tolerance {tolerance:.3e} (estimate {estimate:.3e})")]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    #[error("oracle did not converge across the dimension ladder:\n{table}")]
    NonConvergence { table: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
