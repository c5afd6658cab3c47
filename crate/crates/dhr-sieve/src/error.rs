//! Error taxonomy shared by all modules.

use std::fmt;

/// Everything that can go wrong while building or querying a sieve context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation
    /// (division by an interval containing zero, log of a non-positive
    /// interval, evaluation outside [0,1], ...).
    Domain(String),
    /// The caller violated an API precondition (mismatched degrees,
    /// missing predecessor pieces, kappa > h, ...).
    Usage(String),
    /// A search or bracketing step failed (no sign change, no interior
    /// minimum, iteration cap reached).
    Compute(String),
    /// An enclosure is too wide to make a certified decision; retrying at
    /// higher working precision may succeed.
    Precision(String),
    /// An evaluation point cannot be assigned to a piece because its
    /// enclosure straddles a piece boundary. Policy is to abort rather
    /// than widen over both candidate pieces.
    AmbiguousBoundary(String),
    /// The polynomial system is degenerate (shared roots, proportional
    /// factors, zero resultant).
    InvalidSystem(String),
    /// A brute-force job exceeds its configured work budget.
    Budget(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Usage(m) => write!(f, "usage error: {m}"),
            Error::Compute(m) => write!(f, "compute error: {m}"),
            Error::Precision(m) => write!(f, "precision error: {m}"),
            Error::AmbiguousBoundary(m) => write!(f, "ambiguous boundary: {m}"),
            Error::InvalidSystem(m) => write!(f, "invalid system: {m}"),
            Error::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
