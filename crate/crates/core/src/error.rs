use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum out of range: eigenvalue {eigenvalue:e} outside [{lower:e}, {upper:e}) at order {order}")]
    SpectrumOutOfRange {
        eigenvalue: f64,
        lower: f64,
        upper: f64,
        order: usize,
    },
    #[error("argument {x} outside the supported range [-{limit}, {limit}]")]
    RangeExceeded { x: f64, limit: f64 },
    #[error("truncation too tight: {0}")]
    TruncationTooTight(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(
        "dominance not established: remainder exponent {log_remainder:e} exceeds {threshold:e}"
    )]
    DominanceNotEstablished { log_remainder: f64, threshold: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short stable name, used on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SpectrumOutOfRange { .. } => "SpectrumOutOfRange",
            Error::RangeExceeded { .. } => "RangeExceeded",
            Error::TruncationTooTight(_) => "TruncationTooTight",
            Error::NoConvergence(_) => "NoConvergence",
            Error::DomainError(_) => "DomainError",
            Error::DominanceNotEstablished { .. } => "DominanceNotEstablished",
            Error::QuadratureFailure(_) => "QuadratureFailure",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
