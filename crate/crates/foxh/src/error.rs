//! Error type shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

/// Everything that can go wrong while validating parameters, computing
/// coefficients, or running the numerical oracles.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("non-positive weight: {0}")]
    NonPositiveWeight(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("z = 0 is outside every existence domain")]
    ZeroArgument,
    #[error("gamma pole at {0}")]
    PoleOfGamma(Complex64),
    #[error("estimate undefined: {0}")]
    DomainError(String),
    #[error("integrand factor has a pole at s = {0}")]
    AtPole(Complex64),
    #[error("jet shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("jet reciprocal of a series with zero constant term")]
    ZeroConstantTerm,
    #[error("not a pole: {0}")]
    NotAPole(String),
    #[error("pole is not simple: {0}")]
    NotSimple(String),
    #[error("pole families are not separated: {0}")]
    SeparationViolated(String),
    #[error("catastrophic cancellation in jet coefficient assembly: {0}")]
    JetPrecisionLoss(String),
    #[error("outside the existence domain: {0}")]
    NotInDomain(String),
    #[error("series did not converge: {0}")]
    NoConvergence(String),
    #[error("contour invalid: {0}")]
    ContourInvalid(String),
    #[error("integrand decays too slowly for the truncation budget: {0}")]
    SlowDecay(String),
    #[error("circle encloses more than one pole group: {0}")]
    MultiplePoleEnclosure(String),
    #[error("quadrature node doubling did not converge: {0}")]
    NonConvergent(String),
    #[error("unknown corpus case: {0}")]
    UnknownCase(String),
    #[error("argument outside the case validity domain: {0}")]
    OutOfDomain(String),
    #[error("pole family is empty: {0}")]
    EmptyFamily(String),
    #[error("bad input: {0}")]
    BadInput(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI's structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OrderViolation(_) => "OrderViolation",
            Error::NonPositiveWeight(_) => "NonPositiveWeight",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::ZeroArgument => "ZeroArgument",
            Error::PoleOfGamma(_) => "PoleOfGamma",
            Error::DomainError(_) => "DomainError",
            Error::AtPole(_) => "AtPole",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::ZeroConstantTerm => "ZeroConstantTerm",
            Error::NotAPole(_) => "NotAPole",
            Error::NotSimple(_) => "NotSimple",
            Error::SeparationViolated(_) => "SeparationViolated",
            Error::JetPrecisionLoss(_) => "JetPrecisionLoss",
            Error::NotInDomain(_) => "NotInDomain",
            Error::NoConvergence(_) => "NoConvergence",
            Error::ContourInvalid(_) => "ContourInvalid",
            Error::SlowDecay(_) => "SlowDecay",
            Error::MultiplePoleEnclosure(_) => "MultiplePoleEnclosure",
            Error::NonConvergent(_) => "NonConvergent",
            Error::UnknownCase(_) => "UnknownCase",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::EmptyFamily(_) => "EmptyFamily",
            Error::BadInput(_) => "BadInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
