use core::fmt;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Adaptive quadrature hit its subdivision limit or saw a non-finite value.
    Quadrature { intervals: usize, error_estimate: f64 },
    /// The metric does not carry enough data for the requested quantity.
    Unsupported(&'static str),
    /// A density sample table is malformed.
    InvalidTable(&'static str),
    /// The discrete operator could not be built.
    Assembly { k: u32, n: usize, reason: &'static str },
    /// Too many eigenpairs requested for the grid.
    Resolution { n: usize, count: usize },
    /// The tridiagonal eigensolver failed to converge.
    NoConvergence { k: u32, n: usize },
    /// The shooting integrator failed its step-doubling check.
    Integrator { steps: usize, estimate: f64 },
    /// No bracketing interval was found for a root or eigenvalue search.
    Bracket(&'static str),
    /// Inputs are individually valid but inconsistent with each other.
    Usage(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Quadrature { intervals, error_estimate } => {
                write!(f, "quadrature failed after {intervals} subintervals (error estimate {error_estimate:e})")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::InvalidTable(why) => write!(f, "invalid density table: {why}"),
            Error::Assembly { k, n, reason } => {
                write!(f, "assembly failed for mode k={k}, n={n}: {reason}")
            }
            Error::Resolution { n, count } => {
                write!(f, "{count} eigenpairs requested but grid n={n} resolves at most {}", n / 4)
            }
            Error::NoConvergence { k, n } => {
                write!(f, "eigensolver did not converge for mode k={k}, n={n}")
            }
            Error::Integrator { steps, estimate } => {
                write!(f, "shooting integrator with {steps} steps failed step-doubling check (estimate {estimate:e})")
            }
            Error::Bracket(what) => write!(f, "bracket not found: {what}"),
            Error::Usage(what) => write!(f, "usage error: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
