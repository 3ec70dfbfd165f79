use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// Adaptive refinement stopped before reaching the requested tolerance.
    /// `value` and `est_abs_error` carry the best estimate obtained.
    Convergence {
        value: f64,
        est_abs_error: f64,
        subdivisions: usize,
    },
    /// The regulator extrapolation residual exceeded its tolerance.
    FitResidual { residual: f64, tolerance: f64 },
    /// A supplied law produced a value that is not a probability.
    NotAProbability { value: f64 },
    /// First-order transition probability above one.
    PerturbationBreakdown { probability: f64 },
    /// Parameters are individually valid but the combination is not supported.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::Convergence {
                value,
                est_abs_error,
                subdivisions,
            } => write!(
                f,
                "quadrature did not converge after {subdivisions} subdivisions \
                 (best estimate {value}, estimated error {est_abs_error})"
            ),
            Error::FitResidual { residual, tolerance } => write!(
                f,
                "regulator extrapolation residual {residual} exceeds tolerance {tolerance}"
            ),
            Error::NotAProbability { value } => {
                write!(f, "single-interval law returned {value}, outside [0, 1]")
            }
            Error::PerturbationBreakdown { probability } => write!(
                f,
                "first-order transition probability {probability} exceeds 1; \
                 perturbation theory is not applicable"
            ),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
