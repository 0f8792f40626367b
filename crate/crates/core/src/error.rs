use thiserror::Error;

use crate::model::Frame;

/// Errors raised by the simulator and the analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} lies outside the pulse window [0, {t_f}]")]
    Domain { t: f64, t_f: f64 },

    #[error("density matrix is in the {found:?} frame, expected {expected:?}")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("step size guard violated: h*G0 = {h_g0:.4} exceeds {limit} (use at least {min_steps} steps)")]
    StepGuard {
        h_g0: f64,
        limit: f64,
        min_steps: usize,
    },

    #[error("integration failure at t = {t}: trace drift {drift:e}")]
    Integration { t: f64, drift: f64 },

    #[error("non-physical state: eigenvalue {eigenvalue:e} below tolerance")]
    NonPhysical { eigenvalue: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} > tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("degenerate configuration: optimal-coefficient denominator {denominator:e} vanishes")]
    Degenerate { denominator: f64 },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
