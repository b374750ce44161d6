use thiserror::Error;

use crate::spectral::ComplexField;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("field not resolved: magnitude {magnitude:e} at the box edge exceeds {limit:e}")]
    Unresolved { magnitude: f64, limit: f64 },

    #[error("quadrature did not converge after {evaluations} evaluations (partial value {partial}, error estimate {error_estimate:e})")]
    QuadratureNonConvergence {
        partial: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("cutoff not found: |integrand| stayed above {threshold:e} down to x = {searched_to}")]
    CutoffNotFound { threshold: f64, searched_to: f64 },

    #[error("CFL guard violated at t = {time}: dt * max|u|^p * xi_max = {value} > 1")]
    Cfl { time: f64, value: f64 },

    #[error("state became non-finite at t = {time}")]
    NonFiniteState {
        time: f64,
        last_good: Box<ComplexField>,
    },

    #[error("trajectory too sparse: snapshot spacing {spacing} exceeds {limit}")]
    TooSparse { spacing: f64, limit: f64 },

    #[error("regression needs at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::InvalidParameter { .. }
                | Error::NonFinite(_)
                | Error::Unresolved { .. }
                | Error::TooSparse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
