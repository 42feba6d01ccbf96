use thiserror::Error;

/// Errors raised by the particle-field computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("derivative order {0} is not supported (0, 1 or 2)")]
    UnsupportedOrder(usize),

    #[error("speed {v} is not below the speed of light {c}")]
    Superluminal { v: f64, c: f64 },

    #[error("out of regime: {reason} (value {value})")]
    OutOfRegime { reason: String, value: f64 },

    #[error("numerical failure: {reason} (residual {residual:e})")]
    NumericalFailure { reason: String, residual: f64 },

    #[error("level {n} not found in energy bracket [{lo}, {hi}]")]
    LevelNotFound { n: usize, lo: f64, hi: f64 },

    #[error("postulate residual undefined for an identically zero profile")]
    UndefinedResidual,

    #[error("the non-relativistic limit does not apply to a massless (photonic) system")]
    PhotonicNotApplicable,

    #[error("parse error: {0}")]
    Parse(String),
}

impl PfError {
    pub(crate) fn out_of_regime(reason: impl Into<String>, value: f64) -> Self {
        PfError::OutOfRegime {
            reason: reason.into(),
            value,
        }
    }

    pub(crate) fn numerical(reason: impl Into<String>, residual: f64) -> Self {
        PfError::NumericalFailure {
            reason: reason.into(),
            residual,
        }
    }
}

pub type Result<T, E = PfError> = std::result::Result<T, E>;
