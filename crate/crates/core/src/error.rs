use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),

    #[error("index error: degree {ell}, order {m}")]
    Index { ell: i64, m: i64 },

    #[error("evaluation at a pole is undefined for degree {ell}")]
    Pole { ell: usize },

    #[error("grid of exactness degree {grid_degree} cannot resolve truncation degree {ell_max}")]
    DegreeMismatch { grid_degree: usize, ell_max: usize },

    #[error("covariance factorization failed: {0}")]
    NotPositiveDefinite(String),

    #[error("non-finite kernel value at s = {s}")]
    NonFiniteKernel { s: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("invalid parameters: {constraint} violated")]
    InvalidParams { constraint: String },

    #[error("admissibility violation: {0}")]
    Admissibility(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(constraint: impl Into<String>) -> Self {
        Error::InvalidParams {
            constraint: constraint.into(),
        }
    }

    /// True for errors that stem from loss of numerical accuracy rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AccuracyLoss(_)
                | Error::Quadrature(_)
                | Error::NotPositiveDefinite(_)
                | Error::NonFiniteKernel { .. }
        )
    }
}
