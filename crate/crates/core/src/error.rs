use thiserror::Error;

use crate::arith::Interval;

/// Errors raised by the library.
///
/// The CLI maps `Parse` to exit code 1, `Budget` to 3 and everything else
/// to 2.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("family is not monic; pass it through monic_normalize first")]
    NotMonic,

    #[error("leading coefficient {0} is not a rational ({1})-th power up to an admissible sign")]
    NormalizationUnavailable(String, u32),

    #[error("not computed: {0}")]
    NotComputed(String),

    #[error("iteration budget of {steps} steps exhausted; best enclosure [{}, {}]", best.lo(), best.hi())]
    Budget { steps: usize, best: Interval },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
