use thiserror::Error;

use crate::ks::SeriesResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),

    #[error("outside the convergence domain: {0}")]
    DomainViolation(String),

    #[error("matrix is not symmetric: max |s_jk - s_kj| = {0:e}")]
    Asymmetry(f64),

    #[error("matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("series did not converge by degree {}: last shell norm {:e}", .0.degree_reached, .0.last_shell_norm)]
    TruncationNotConverged(Box<SeriesResult>),

    #[error(
        "quadrature under-resolved: {points} -> {doubled} points changed the value by {change:e}"
    )]
    QuadratureUnderResolved {
        points: usize,
        doubled: usize,
        change: f64,
    },

    #[error("matrix is not symmetric positive definite")]
    NotSpd,

    #[error("matrix is not Hermitian positive definite")]
    NotPd,

    #[error("infinite q-product diverges for q = {0}")]
    DivergentProduct(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Partial series carried by a truncation failure, if any.
    pub fn partial(&self) -> Option<&SeriesResult> {
        match self {
            Error::TruncationNotConverged(r) => Some(r),
            _ => None,
        }
    }
}
