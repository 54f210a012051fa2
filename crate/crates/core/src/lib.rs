//! Adaptive random-walk Metropolis sampling and its diffusion limit.
//!
//! The sampler tunes its Gaussian proposal scale from the last acceptance:
//! after every step the scale is multiplied by `exp((xi - p) / sqrt(n))`,
//! so it grows on acceptance and shrinks on rejection. Speeding time up by
//! `n` and scaling displacements by `1/sqrt(n)` turns the pair
//! `(X, theta)` into a coupled diffusion; for a standard normal target the
//! limit is
//!
//! ```text
//! dX_t        = -(theta_t^2 / 2) X_t dt + theta_t dW_t
//! d theta_t   = theta_t (p - theta_t |X_t| / sqrt(2 pi)) dt
//! ```
//!
//! whose invariant law has standard normal X-marginal. This crate simulates
//! both levels, checks that they agree, and verifies the supporting
//! machinery numerically: the Lie-bracket rank condition of the mollified
//! vector fields, exact even/odd moment recursions with their closed-form
//! limits, and the pathwise and ensemble bounds the analysis rests on.
//!
//! Entry points:
//! - [`sampler`]: the discrete chain and its time-rescaled version,
//! - [`diffusion`]: Euler-Maruyama paths and replica ensembles,
//! - [`hormander`]: vector fields, brackets, and the span check,
//! - [`moments`]: exact recursions, Monte Carlo estimates, bound checks,
//! - [`config`] / [`experiment`]: the batch CLI behind the `amcmc` binary.

pub mod config;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod hormander;
pub mod moments;
pub mod rng;
pub mod sampler;
pub mod targets;

pub use error::{Error, Result};
