use core::fmt;

/// Errors produced by the computation layers.
///
/// Kinds are kept coarse so that front ends can map each one onto a stable
/// exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the quantity is defined.
    Domain(&'static str),
    /// Adaptive quadrature hit its subdivision limit before reaching the
    /// requested tolerance.
    Quadrature { value: f64, error: f64 },
    /// A truncation or step-size refinement did not settle.
    Convergence {
        what: &'static str,
        shift: f64,
        tolerance: f64,
    },
    /// The request is well formed but outside what is implemented.
    Unsupported(&'static str),
    /// A referenced item (location id, mode index, ...) does not exist.
    NotFound(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Short machine-readable kind tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "numeric",
            Error::Convergence { .. } => "convergence",
            Error::Unsupported(_) => "unsupported",
            Error::NotFound(_) => "not_found",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Quadrature { value, error } => write!(
                f,
                "quadrature did not converge: estimate {value:e} with error {error:e}"
            ),
            Error::Convergence { what, shift, tolerance } => write!(
                f,
                "{what} did not converge: shift {shift:e} exceeds tolerance {tolerance:e}"
            ),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::NotFound(msg) => write!(f, "not found: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
