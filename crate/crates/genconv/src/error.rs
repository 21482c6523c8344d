//! Error types shared across the crate.

use thiserror::Error;

/// Coarse classification used by callers that map failures to process
/// exit codes: bad inputs versus numerical breakdown on valid inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller handed us something outside the contract.
    Input,
    /// Inputs were valid but the computation could not be completed
    /// to the requested accuracy or within representable range.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A measure description violated an invariant (weights, ordering,
    /// endpoint constraints, ...).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// Adaptive quadrature hit its refinement cap before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },

    /// A denominator Pochhammer factor of a terminating hypergeometric
    /// series vanished before the numerator terminated.
    #[error("hypergeometric pole: denominator parameter c={c} vanishes at term {term}")]
    HypergeometricPole { c: f64, term: usize },

    /// A moment computation left the representable range of f64.
    #[error("moment overflow at order m={order}")]
    MomentOverflow { order: usize },

    /// A combinatorial enumeration would exceed the configured budget.
    #[error("combinatorial blowup: {count} items exceeds limit {limit}")]
    CombinatorialBlowup { count: u128, limit: u128 },

    /// Failure reading or parsing a measure file or config.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::InvalidMeasure(_) | Error::Parse(_) => ErrorKind::Input,
            Error::QuadratureNonConvergence { .. }
            | Error::HypergeometricPole { .. }
            | Error::MomentOverflow { .. }
            | Error::CombinatorialBlowup { .. } => ErrorKind::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
