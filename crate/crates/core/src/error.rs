//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A target log-density or score came back non-finite.
    #[error("density evaluation failed at x = {x}: {what} = {value}")]
    DensityEvaluation {
        x: f64,
        what: &'static str,
        value: f64,
    },

    /// The proposal scale escaped past the configured cap; the chosen
    /// parameters give an unstable integration.
    #[error("theta blow-up at t = {t}: theta = {theta:.6e} exceeds cap {cap:.1e}")]
    ThetaBlowUp { t: f64, theta: f64, cap: f64 },

    /// Vector fields live on eta > 0.
    #[error("vector field {name} evaluated outside eta > 0 (eta = {eta})")]
    FieldDomain { name: String, eta: f64 },

    /// A field produced a non-finite component.
    #[error("vector field {name} returned a non-finite value at (x = {x}, eta = {eta})")]
    FieldValue { name: String, x: f64, eta: f64 },

    /// A finite-difference stencil would step outside eta > 0.
    #[error("finite-difference stencil leaves eta > 0 (eta = {eta}, h = {h})")]
    StencilDomain { eta: f64, h: f64 },

    /// Invalid configuration value; the message names the offending key.
    #[error("config error: {0}")]
    Config(String),

    /// Moment estimation was asked to reduce an empty replica ensemble.
    #[error("empty replica ensemble")]
    EmptyEnsemble,

    /// Time averages are undefined at t = 0.
    #[error("time average undefined at t = 0")]
    ZeroTime,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
