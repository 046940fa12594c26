use core::fmt;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of the function.
    Domain { what: &'static str, value: f64 },
    /// A denominator Pochhammer symbol vanishes inside a sum.
    PoleInDenominator { index: usize },
    /// An iterative procedure did not converge.
    NoConvergence { what: &'static str, iterations: usize },
    /// The tridiagonal eigensolver failed.
    EigenFailure { size: usize },
    /// The measure's quadrature rule is not exact for the requested degree.
    DegreeTooLow { needed: usize, available: usize },
    /// Stencil access outside the stored grid.
    IndexOutOfGrid { i: usize, j: usize },
    /// A recurrence step would divide by zero.
    ZeroLeadingCoefficient { index: usize },
    /// The ray lies outside the real-saddle regime.
    WrongRegime { k1: u32, k2: u32 },
    /// Invalid ultraspherical parameter.
    InvalidLambda(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} outside domain"),
            Error::PoleInDenominator { index } => {
                write!(f, "denominator vanishes at term {index}")
            }
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::EigenFailure { size } => {
                write!(f, "tridiagonal eigensolver failed for size {size}")
            }
            Error::DegreeTooLow { needed, available } => write!(
                f,
                "quadrature exact to degree {available}, degree {needed} required"
            ),
            Error::IndexOutOfGrid { i, j } => write!(f, "stencil at ({i}, {j}) leaves the grid"),
            Error::ZeroLeadingCoefficient { index } => {
                write!(f, "zero leading coefficient at index {index}")
            }
            Error::WrongRegime { k1, k2 } => write!(
                f,
                "ray ({k1}, {k2}) has complex saddles: need sqrt(2)*k2/k1 > 1"
            ),
            Error::InvalidLambda(l) => {
                write!(f, "lambda = {l} not allowed: need lambda > -1/2 and lambda != 0")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
