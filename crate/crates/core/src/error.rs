use thiserror::Error;

/// Errors raised anywhere in the regime-detection pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence after {iterations} iterations (estimate {estimate:e}, error bound {error_bound:e})")]
    NoConvergence {
        estimate: f64,
        error_bound: f64,
        iterations: usize,
    },

    #[error("root is not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("series diverges at order {order} for s = {s:e}; retry with a smaller |s|")]
    SeriesDivergence { order: usize, s: f64 },

    #[error("infeasible ME fit: mean received power {mean_y:e} W does not exceed signal power {phi:e} W")]
    InfeasibleFit { mean_y: f64, phi: f64 },

    #[error("invalid config: field `{field}` = {value}: {constraint}")]
    Config {
        field: String,
        value: String,
        constraint: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &str, value: impl ToString, constraint: &str) -> Self {
        Error::Config {
            field: field.to_string(),
            value: value.to_string(),
            constraint: constraint.to_string(),
        }
    }

    /// True for failures of a numerical routine (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::NoBracket { .. } | Error::SeriesDivergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
