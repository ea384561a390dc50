use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("solution violates invariant: {0}")]
    InvariantViolation(String),

    #[error("singular matrix at grid point {0}")]
    Singular(usize),

    #[error("circulant embedding clipped {fraction:e} of the spectral mass")]
    EmbeddingClipped { fraction: f64 },

    #[error("band matrix of shape {rows}x{cols} exceeds the dense size cap")]
    DimensionCap { rows: usize, cols: usize },

    #[error("Cholesky factorization failed")]
    Factorization,

    #[error("adaptive quadrature did not reach tolerance {tol:e}")]
    Quadrature { tol: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
