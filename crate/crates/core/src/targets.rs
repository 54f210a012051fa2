//! Target densities: unnormalized 1-d log-densities together with their
//! score function `(d/dx) log psi`.
//!
//! The score is carried on the same object as the log-density even though
//! the discrete sampler never reads it: the diffusion drift needs it, and
//! keeping both on one value rules out drift/target mismatches.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An unnormalized 1-d density `psi`, exposed through `log psi` (additive
/// constant dropped) and its score `psi'/psi`.
///
/// Instances are immutable and cheap to clone; concurrent replicas share
/// them freely.
#[derive(Clone)]
pub struct TargetDensity {
    name: String,
    log_density: RealFn,
    score: RealFn,
}

impl TargetDensity {
    /// Build a target from a user-supplied log-density and score. The score
    /// is not checked against the log-density; the caller owns consistency.
    pub fn new(
        name: impl Into<String>,
        log_density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        score: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            log_density: Arc::new(log_density),
            score: Arc::new(score),
        }
    }

    /// Standard normal: `log psi(x) = -x^2/2`, `score(x) = -x`.
    pub fn standard_normal() -> Self {
        Self::new("standard_normal", |x| -0.5 * x * x, |x| -x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn log_density(&self, x: f64) -> f64 {
        (self.log_density)(x)
    }

    pub fn score(&self, x: f64) -> f64 {
        (self.score)(x)
    }

    pub(crate) fn checked_log_density(&self, x: f64) -> Result<f64> {
        let v = self.log_density(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DensityEvaluation {
                x,
                what: "log-density",
                value: v,
            })
        }
    }

    pub(crate) fn checked_score(&self, x: f64) -> Result<f64> {
        let v = self.score(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DensityEvaluation {
                x,
                what: "score",
                value: v,
            })
        }
    }
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity")
            .field("name", &self.name)
            .finish()
    }
}

/// Metropolis acceptance probability `min{1, psi(y)/psi(x)}`, evaluated in
/// log space so large |x| cannot overflow the ratio.
pub fn acceptance_probability(target: &TargetDensity, x: f64, y: f64) -> Result<f64> {
    let lx = target.checked_log_density(x)?;
    let ly = target.checked_log_density(y)?;
    Ok((ly - lx).min(0.0).exp())
}
