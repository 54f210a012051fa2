//! Discrete adaptive random-walk Metropolis sampler and its time-rescaled
//! version.
//!
//! Base algorithm, one step from `(x, theta)` at iteration `n`:
//!
//! 1. propose `y = x + theta * eps` with `eps ~ N(0, 1)`,
//! 2. accept with probability `min{1, psi(y)/psi(x)}`, set `xi` in {0, 1},
//! 3. update `theta <- theta * exp((xi - p_acc) / sqrt(n + 1))`.
//!
//! The square root uses the post-increment iteration index: the scale update
//! reacts to the acceptance of the step just taken. `theta` is the proposal
//! *standard deviation* throughout.
//!
//! The rescaled chain runs `n_scale` steps per unit of chain time with
//! displacements shrunk by `1/sqrt(n_scale)`; its scale update targets
//! `p_n = 1 - p/sqrt(n_scale)` instead of a fixed acceptance level, and `x`
//! moves only on accepted steps. As `n_scale` grows, time-`t` marginals
//! approach the coupled diffusion in [`crate::diffusion`].

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::targets::{acceptance_probability, TargetDensity};

/// Walker state: current sample, proposal scale, last acceptance flag, and
/// the number of completed iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainState {
    pub x: f64,
    pub theta: f64,
    pub xi: bool,
    pub n: u64,
}

impl ChainState {
    /// Fresh state before the first iteration.
    pub fn new(x0: f64, theta0: f64) -> Result<Self> {
        if !theta0.is_finite() || theta0 <= 0.0 {
            return Err(Error::Config(format!("theta0 must be > 0, got {theta0}")));
        }
        Ok(Self {
            x: x0,
            theta: theta0,
            xi: false,
            n: 0,
        })
    }

    /// Acceptance indicator as 0.0 / 1.0.
    pub fn xi_indicator(&self) -> f64 {
        if self.xi {
            1.0
        } else {
            0.0
        }
    }
}

/// Adaptation parameter of the base algorithm: the acceptance level the
/// scale update drifts toward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteAdaptParams {
    pub p_acc: f64,
}

impl DiscreteAdaptParams {
    pub fn new(p_acc: f64) -> Result<Self> {
        if p_acc.is_nan() || p_acc <= 0.0 || p_acc >= 1.0 {
            return Err(Error::Config(format!(
                "p_acc must lie in (0, 1), got {p_acc}"
            )));
        }
        Ok(Self { p_acc })
    }
}

/// Parameters of the rescaled chain: the discretization level and the
/// diffusion-level adaptation rate entering through `p_n = 1 - p/sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledChainParams {
    pub n_scale: u64,
    pub p: f64,
}

impl ScaledChainParams {
    pub fn new(n_scale: u64, p: f64) -> Result<Self> {
        if n_scale == 0 {
            return Err(Error::Config("n_scale must be >= 1".into()));
        }
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Config(format!("p must be > 0, got {p}")));
        }
        if p / (n_scale as f64).sqrt() >= 1.0 {
            return Err(Error::Config(format!(
                "p / sqrt(n_scale) must be < 1 so that p_n is in (0, 1); \
                 got p = {p}, n_scale = {n_scale}"
            )));
        }
        Ok(Self { n_scale, p })
    }

    /// Per-step target level `p_n = 1 - p / sqrt(n_scale)`.
    pub fn p_n(&self) -> f64 {
        1.0 - self.p / (self.n_scale as f64).sqrt()
    }

    /// Chain time advanced per step.
    pub fn dt(&self) -> f64 {
        1.0 / self.n_scale as f64
    }
}

/// One step of the base algorithm.
pub fn step_discrete(
    state: &ChainState,
    params: &DiscreteAdaptParams,
    target: &TargetDensity,
    rng: &mut RandomSource,
) -> Result<ChainState> {
    let eps = rng.standard_normal();
    let u = rng.uniform();
    step_discrete_with(state, params, target, eps, u)
}

/// Deterministic kernel of [`step_discrete`], driven by the supplied
/// proposal deviate and acceptance uniform.
pub fn step_discrete_with(
    state: &ChainState,
    params: &DiscreteAdaptParams,
    target: &TargetDensity,
    eps: f64,
    u: f64,
) -> Result<ChainState> {
    let y = state.x + state.theta * eps;
    let alpha = acceptance_probability(target, state.x, y)?;
    let accept = u < alpha;
    let n = state.n + 1;
    let xi = if accept { 1.0 } else { 0.0 };
    let theta = state.theta * ((xi - params.p_acc) / (n as f64).sqrt()).exp();
    Ok(ChainState {
        x: if accept { y } else { state.x },
        theta,
        xi: accept,
        n,
    })
}

/// One increment of the rescaled chain.
pub fn step_scaled(
    state: &ChainState,
    params: &ScaledChainParams,
    target: &TargetDensity,
    rng: &mut RandomSource,
) -> Result<ChainState> {
    let eps = rng.standard_normal();
    let u = rng.uniform();
    step_scaled_with(state, params, target, eps, u)
}

/// Deterministic kernel of [`step_scaled`].
pub fn step_scaled_with(
    state: &ChainState,
    params: &ScaledChainParams,
    target: &TargetDensity,
    eps: f64,
    u: f64,
) -> Result<ChainState> {
    let root_n = (params.n_scale as f64).sqrt();
    let y = state.x + state.theta * eps / root_n;
    let alpha = acceptance_probability(target, state.x, y)?;
    let accept = u < alpha;
    let xi = if accept { 1.0 } else { 0.0 };
    let theta = state.theta * ((xi - params.p_n()) / root_n).exp();
    Ok(ChainState {
        // x moves only on acceptance; a rejected displacement is discarded.
        x: if accept { y } else { state.x },
        theta,
        xi: accept,
        n: state.n + 1,
    })
}

/// Stepper selection for [`run_chain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainParams {
    Discrete(DiscreteAdaptParams),
    Scaled(ScaledChainParams),
}

impl ChainParams {
    pub fn step(
        &self,
        state: &ChainState,
        target: &TargetDensity,
        rng: &mut RandomSource,
    ) -> Result<ChainState> {
        match self {
            ChainParams::Discrete(p) => step_discrete(state, p, target, rng),
            ChainParams::Scaled(p) => step_scaled(state, p, target, rng),
        }
    }

    /// Chain time advanced per step: 1 for the base algorithm, `1/n_scale`
    /// for the rescaled chain.
    pub fn time_step(&self) -> f64 {
        match self {
            ChainParams::Discrete(_) => 1.0,
            ChainParams::Scaled(p) => p.dt(),
        }
    }
}

/// One retained row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x: f64,
    pub theta: f64,
    pub xi: bool,
}

impl TrajectoryRecord {
    fn from_state(state: &ChainState, time_step: f64) -> Self {
        Self {
            t: state.n as f64 * time_step,
            x: state.x,
            theta: state.theta,
            xi: state.xi,
        }
    }
}

/// Run `steps` iterations, recording the initial state and then every
/// `thin`-th step. Deterministic given the random source.
pub fn run_chain(
    init: ChainState,
    params: &ChainParams,
    target: &TargetDensity,
    steps: u64,
    thin: u64,
    rng: &mut RandomSource,
) -> Result<Vec<TrajectoryRecord>> {
    if thin == 0 {
        return Err(Error::Config("thin must be >= 1".into()));
    }
    let dt = params.time_step();
    let mut out = Vec::with_capacity((steps / thin + 1) as usize);
    out.push(TrajectoryRecord::from_state(&init, dt));
    let mut state = init;
    for i in 1..=steps {
        state = params.step(&state, target, rng)?;
        if i.is_multiple_of(thin) {
            out.push(TrajectoryRecord::from_state(&state, dt));
        }
    }
    Ok(out)
}
