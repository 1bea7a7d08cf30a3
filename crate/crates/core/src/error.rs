use thiserror::Error;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(&'static str),
    #[error("empty radius grid")]
    EmptyGrid,
    #[error("grid must be positive and strictly increasing")]
    BadGrid,
    #[error("domain error: {0}")]
    DomainError(&'static str),
    #[error("quadrature did not converge (estimate {value:e}, error {error:e})")]
    NoConvergence { value: f64, error: f64 },
    #[error("integral is not finite: {0}")]
    NonIntegrable(&'static str),
    #[error("degenerate profile: {0}")]
    DegenerateProfile(&'static str),
    #[error("bad family specification: {0}")]
    BadSpec(&'static str),
    #[error("off-center balls are not computable for this space")]
    UnsupportedOffCenter,
    #[error("exponent order 2C <= beta <= gamma violated")]
    ExponentOrderViolation,
    #[error("the Fubini lifting identity needs k >= 1")]
    RequiresPositiveK,
    #[error("space is not an exact power cone")]
    NotACone,
}

pub type Result<T> = core::result::Result<T, Error>;
