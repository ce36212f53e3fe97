use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the evaluators, optimizers and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("observed covariance is numerically singular ({0})")]
    SingularObservation(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("{what} did not converge (residual {residual:.3e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("critical power is undefined for zero correlation (objective is monotone in b)")]
    DegenerateCorrelation,

    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),

    #[error("config error: {0}")]
    Config(ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where a configuration problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        Error::Config(ConfigError {
            line,
            field: field.to_string(),
            message: message.into(),
        })
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid(format!("correlation must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

pub(crate) fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid(format!("{name} must be finite and >= 0, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_pos(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("{name} must be finite and > 0, got {x}")));
    }
    Ok(())
}
