//! Euler-Maruyama simulation of the coupled limit diffusion.
//!
//! For a standard normal target the pair `Y_t = (X_t, theta_t)` solves
//!
//! ```text
//! dX_t      = -(theta_t^2 / 2) X_t dt + theta_t dW_t
//! d theta_t = theta_t (p - theta_t |X_t| / sqrt(2 pi)) dt
//! ```
//!
//! The theta-equation carries no noise, so along each Brownian path it is a
//! random ODE; it is integrated in log space, which keeps `theta > 0` with
//! no clamping and makes the per-step log increment at most `p * dt`, hence
//! `log theta_t - log theta_0 <= p t` exactly on every simulated path.
//! `eta = 1/theta` is derived from the same `log theta`, so `theta * eta`
//! stays at 1 to machine precision. Path functionals (`int |X|`,
//! `int |X| theta`, the stochastic integral `int theta dW`) accumulate with
//! the left-endpoint rule, consistent with the first-order scheme.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::targets::TargetDensity;

/// sqrt(2 pi), the constant in the theta-drift.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

/// Coupled state plus accumulated path functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionState {
    t: f64,
    /// X_t.
    pub x: f64,
    log_theta: f64,
    steps: u64,
    /// Accumulated `int_0^t |X_u| du` (left-endpoint rule).
    pub path_int_abs_x: f64,
    /// Accumulated `int_0^t |X_u| theta_u du`.
    pub path_int_abs_x_theta: f64,
    /// Accumulated stochastic integral `int_0^t theta_u dW_u`.
    pub stoch_int: f64,
}

impl DiffusionState {
    pub fn new(x0: f64, theta0: f64) -> Result<Self> {
        if !theta0.is_finite() || theta0 <= 0.0 {
            return Err(Error::Config(format!("theta0 must be > 0, got {theta0}")));
        }
        Ok(Self {
            t: 0.0,
            x: x0,
            log_theta: theta0.ln(),
            steps: 0,
            path_int_abs_x: 0.0,
            path_int_abs_x_theta: 0.0,
            stoch_int: 0.0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn theta(&self) -> f64 {
        self.log_theta.exp()
    }

    /// eta_t = 1/theta_t, from the shared log representation.
    pub fn eta(&self) -> f64 {
        (-self.log_theta).exp()
    }

    pub fn log_theta(&self) -> f64 {
        self.log_theta
    }
}

/// Integration parameters for one SDE run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    /// Adaptation rate in the theta-drift.
    pub p: f64,
    /// Euler-Maruyama step.
    pub dt: f64,
    /// Terminal time.
    pub horizon: f64,
    pub x0: f64,
    pub theta0: f64,
    /// Error out if theta ever reaches this cap.
    pub theta_cap: f64,
}

pub const DEFAULT_THETA_CAP: f64 = 1e100;

impl SdeConfig {
    pub fn new(p: f64, dt: f64, horizon: f64, x0: f64, theta0: f64) -> Result<Self> {
        let cfg = Self {
            p,
            dt,
            horizon,
            x0,
            theta0,
            theta_cap: DEFAULT_THETA_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p <= 0.0 {
            return Err(Error::Config(format!("p must be > 0, got {}", self.p)));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.horizon.is_nan() || self.horizon < self.dt {
            return Err(Error::Config(format!(
                "horizon must be >= dt, got horizon = {}, dt = {}",
                self.horizon, self.dt
            )));
        }
        if !self.theta0.is_finite() || self.theta0 <= 0.0 {
            return Err(Error::Config(format!(
                "theta0 must be > 0, got {}",
                self.theta0
            )));
        }
        if self.theta_cap.is_nan() || self.theta_cap <= 0.0 {
            return Err(Error::Config(format!(
                "theta_cap must be > 0, got {}",
                self.theta_cap
            )));
        }
        Ok(())
    }

    /// Number of steps covering the horizon.
    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt).round().max(1.0) as u64
    }
}

/// Drift of the coupled system for an arbitrary target: the X-component is
/// `(theta^2/2) * score(x)` and the theta-component
/// `theta * (p - theta |score(x)| / sqrt(2 pi))`; since the density is
/// strictly positive, `|psi'|/psi = |score|`.
pub fn drift_general(
    target: &TargetDensity,
    x: f64,
    theta: f64,
    p: f64,
) -> Result<(f64, f64)> {
    let score = target.checked_score(x)?;
    Ok((
        0.5 * theta * theta * score,
        theta * (p - theta * score.abs() / SQRT_2PI),
    ))
}

/// Drift specialized to the standard normal target (score = -x).
pub fn drift_normal(x: f64, theta: f64, p: f64) -> (f64, f64) {
    (
        -0.5 * theta * theta * x,
        theta * (p - theta * x.abs() / SQRT_2PI),
    )
}

/// One Euler-Maruyama step.
pub fn em_step(state: &mut DiffusionState, cfg: &SdeConfig, rng: &mut RandomSource) -> Result<()> {
    let z = rng.standard_normal();
    em_step_with(state, cfg, z)
}

/// Deterministic kernel of [`em_step`], driven by the supplied standard
/// normal deviate. Exposed for coupled-path studies (step halving,
/// antithetic pairs) and exact single-step tests.
pub fn em_step_with(state: &mut DiffusionState, cfg: &SdeConfig, z: f64) -> Result<()> {
    let dt = cfg.dt;
    let theta = state.theta();
    let x = state.x;
    let abs_x = x.abs();

    // Left-endpoint accumulation of the path functionals.
    state.path_int_abs_x += abs_x * dt;
    state.path_int_abs_x_theta += abs_x * theta * dt;
    let noise = theta * dt.sqrt() * z;
    state.stoch_int += noise;

    state.x = x + (-0.5 * theta * theta * x) * dt + noise;
    // Noise-free theta-equation integrated in log space at the pre-step
    // state; the increment never exceeds p * dt.
    state.log_theta += (cfg.p - theta * abs_x / SQRT_2PI) * dt;
    state.steps += 1;
    state.t = state.steps as f64 * dt;

    let theta_new = state.theta();
    if theta_new.is_nan() || theta_new >= cfg.theta_cap {
        return Err(Error::ThetaBlowUp {
            t: state.t,
            theta: theta_new,
            cap: cfg.theta_cap,
        });
    }
    Ok(())
}

/// eta_t via its integrated linear ODE:
/// `eta_0 e^{-pt} + int_0^t e^{-p(t-u)} |X_u| / sqrt(2 pi) du`,
/// with the integral taken over left-endpoint samples of |X| spaced `dt`.
pub fn eta_closed_form(eta0: f64, p: f64, abs_x: &[f64], dt: f64) -> f64 {
    let t = abs_x.len() as f64 * dt;
    let mut acc = 0.0;
    for (i, &ax) in abs_x.iter().enumerate() {
        let u = i as f64 * dt;
        acc += (-p * (t - u)).exp() * ax / SQRT_2PI * dt;
    }
    eta0 * (-p * t).exp() + acc
}

/// theta_u in its quotient representation:
/// `e^{pu} / (eta_0 + int_0^u e^{ps} |X_s| / sqrt(2 pi) ds)`.
/// Algebraically the reciprocal of [`eta_closed_form`].
pub fn theta_closed_form(eta0: f64, p: f64, abs_x: &[f64], dt: f64) -> f64 {
    let u_end = abs_x.len() as f64 * dt;
    let mut denom = eta0;
    for (i, &ax) in abs_x.iter().enumerate() {
        let s = i as f64 * dt;
        denom += (p * s).exp() * ax / SQRT_2PI * dt;
    }
    (p * u_end).exp() / denom
}

/// Snapshot of one path at a grid time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub x: f64,
    pub theta: f64,
    pub eta: f64,
    pub log_theta: f64,
    pub stoch_int: f64,
    pub int_abs_x: f64,
    pub int_abs_x_theta: f64,
}

impl PathPoint {
    fn from_state(s: &DiffusionState) -> Self {
        Self {
            t: s.t(),
            x: s.x,
            theta: s.theta(),
            eta: s.eta(),
            log_theta: s.log_theta(),
            stoch_int: s.stoch_int,
            int_abs_x: s.path_int_abs_x,
            int_abs_x_theta: s.path_int_abs_x_theta,
        }
    }
}

/// Replica ensemble of one-path snapshots on a shared time grid.
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    /// Grid times actually hit (each requested time snapped to a step).
    pub times: Vec<f64>,
    /// `replicas[r][j]` is replica `r` at grid index `j`.
    pub replicas: Vec<Vec<PathPoint>>,
}

impl PathEnsemble {
    /// Extract one scalar per snapshot, keeping the grid layout.
    pub fn samples_of(&self, f: impl Fn(&PathPoint) -> f64) -> crate::moments::GridSamples {
        crate::moments::GridSamples {
            times: self.times.clone(),
            per_replica: self
                .replicas
                .iter()
                .map(|path| path.iter().map(&f).collect())
                .collect(),
        }
    }
}

/// Map requested grid times to step counts (nearest step). Nondecreasing
/// because the input grid is increasing.
fn grid_steps(cfg: &SdeConfig, grid: &[f64]) -> Result<Vec<u64>> {
    let total = cfg.steps();
    if grid.is_empty() {
        return Err(Error::Config("time grid must be nonempty".into()));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("time grid must be strictly increasing".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::Config("time grid must start at t >= 0".into()));
    }
    let steps: Vec<u64> = grid.iter().map(|&t| (t / cfg.dt).round() as u64).collect();
    if *steps.last().expect("nonempty") > total {
        return Err(Error::Config(format!(
            "time grid must stay within the horizon {}, got t = {}",
            cfg.horizon,
            grid.last().expect("nonempty")
        )));
    }
    Ok(steps)
}

/// Integrate one path, snapshotting at the grid times.
pub fn run_path(cfg: &SdeConfig, grid: &[f64], rng: &mut RandomSource) -> Result<Vec<PathPoint>> {
    cfg.validate()?;
    let targets = grid_steps(cfg, grid)?;
    let mut state = DiffusionState::new(cfg.x0, cfg.theta0)?;
    let mut out = Vec::with_capacity(targets.len());
    let mut next = 0;
    while next < targets.len() && targets[next] == 0 {
        out.push(PathPoint::from_state(&state));
        next += 1;
    }
    let total = cfg.steps();
    for step in 1..=total {
        em_step(&mut state, cfg, rng)?;
        while next < targets.len() && targets[next] == step {
            out.push(PathPoint::from_state(&state));
            next += 1;
        }
    }
    Ok(out)
}

/// Integrate a replica ensemble in parallel. Replica `r` uses the random
/// stream `(seed, r)`, so the result is independent of thread scheduling.
pub fn run_ensemble(
    cfg: &SdeConfig,
    grid: &[f64],
    replicas: u64,
    seed: u64,
) -> Result<PathEnsemble> {
    cfg.validate()?;
    if replicas == 0 {
        return Err(Error::Config("replicas must be >= 1".into()));
    }
    let paths: Vec<Result<Vec<PathPoint>>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomSource::for_replica(seed, r);
            run_path(cfg, grid, &mut rng)
        })
        .collect();
    let mut replicas_out = Vec::with_capacity(paths.len());
    for p in paths {
        replicas_out.push(p?);
    }
    let times = replicas_out
        .first()
        .map(|p| p.iter().map(|pt| pt.t).collect())
        .unwrap_or_default();
    Ok(PathEnsemble {
        times,
        replicas: replicas_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, dt: f64, horizon: f64, x0: f64, theta0: f64) -> SdeConfig {
        SdeConfig::new(p, dt, horizon, x0, theta0).unwrap()
    }

    #[test]
    fn sqrt_2pi_constant_is_exact() {
        assert_eq!(SQRT_2PI, (2.0 * std::f64::consts::PI).sqrt());
    }

    #[test]
    fn drift_normal_hand_values() {
        assert_eq!(drift_normal(0.0, 1.0, 0.3), (0.0, 0.3));
        // At (x, theta, p) = (2, 1, 1): (-(1/2) * 2, 1 - 2/sqrt(2 pi)).
        let (bx, bt) = drift_normal(2.0, 1.0, 1.0);
        assert_eq!(bx, -1.0);
        assert!((bt - (1.0 - 2.0 / SQRT_2PI)).abs() < 1e-15);
        assert!((bt - 0.202_115_439_197_134_6).abs() < 1e-12);
    }

    #[test]
    fn drift_theta_zero_locus() {
        for &x in &[0.5f64, 1.0, -2.0, 3.7] {
            let p = 0.8;
            let theta_star = p * SQRT_2PI / x.abs();
            let (_, bt) = drift_normal(x, theta_star, p);
            assert!(bt.abs() < 1e-12 * theta_star, "bt = {bt}");
        }
    }

    #[test]
    fn drift_general_hand_values() {
        let t = TargetDensity::standard_normal();
        assert_eq!(drift_general(&t, 0.0, 2.0, 0.5).unwrap(), (0.0, 1.0));
        let (bx, bt) = drift_general(&t, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(bx, -0.5);
        assert!((bt - (1.0 - 1.0 / SQRT_2PI)).abs() < 1e-15);
        assert!((bt - 0.601_057_719_598_567_3).abs() < 1e-12);
    }

    #[test]
    fn drift_general_matches_drift_normal() {
        let t = TargetDensity::standard_normal();
        let mut rng = RandomSource::from_seed(3);
        for _ in 0..1000 {
            let x = 6.0 * (rng.uniform() - 0.5);
            let theta = 0.05 + 5.0 * rng.uniform();
            let p = 0.1 + 2.0 * rng.uniform();
            let (gx, gt) = drift_general(&t, x, theta, p).unwrap();
            let (nx, nt) = drift_normal(x, theta, p);
            assert!((gx - nx).abs() <= 1e-14 * nx.abs().max(1.0));
            assert!((gt - nt).abs() <= 1e-14 * nt.abs().max(1.0));
        }
    }

    #[test]
    fn drift_general_rejects_non_finite_score() {
        let bad = TargetDensity::new("bad", |_| 0.0, |_| f64::INFINITY);
        assert!(drift_general(&bad, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn em_step_at_origin_with_zero_noise() {
        let c = cfg(0.7, 0.01, 1.0, 0.0, 1.0);
        let mut s = DiffusionState::new(0.0, 1.0).unwrap();
        em_step_with(&mut s, &c, 0.0).unwrap();
        assert_eq!(s.x, 0.0);
        assert_eq!(s.log_theta(), 0.7 * 0.01);
    }

    #[test]
    fn em_step_hand_value() {
        let c = cfg(1.0, 0.01, 1.0, 1.0, 1.0);
        let mut s = DiffusionState::new(1.0, 1.0).unwrap();
        em_step_with(&mut s, &c, 0.0).unwrap();
        assert!((s.x - 0.995).abs() < 1e-15);
        let expect = (1.0 - 1.0 / SQRT_2PI) * 0.01;
        assert!((s.log_theta() - expect).abs() < 1e-18);
    }

    #[test]
    fn theta_positive_and_bounded_along_path() {
        let c = cfg(1.0, 1e-3, 20.0, 0.0, 1.0);
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut rng = RandomSource::from_seed(5);
        let log_theta0 = c.theta0.ln();
        for _ in 0..c.steps() {
            em_step(&mut s, &c, &mut rng).unwrap();
            assert!(s.theta() > 0.0);
            // Exact pathwise ceiling from the log-space update.
            assert!(s.log_theta() - log_theta0 <= c.p * s.t());
            // And the matching eta floor.
            assert!(-s.log_theta() >= -(log_theta0 + c.p * s.t()));
        }
    }

    #[test]
    fn theta_positive_after_a_million_steps() {
        let c = cfg(1.0, 1e-3, 1000.0, 0.0, 1.0);
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut rng = RandomSource::from_seed(45);
        for _ in 0..c.steps() {
            em_step(&mut s, &c, &mut rng).unwrap();
        }
        assert_eq!(s.steps(), 1_000_000);
        assert!(s.theta() > 0.0 && s.theta().is_finite());
    }

    #[test]
    fn theta_eta_reciprocal_within_1e12() {
        let c = cfg(1.0, 1e-3, 5.0, 0.0, 2.0);
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut rng = RandomSource::from_seed(6);
        for _ in 0..c.steps() {
            em_step(&mut s, &c, &mut rng).unwrap();
            assert!((s.theta() * s.eta() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pinned_x_grows_theta_at_rate_p() {
        // Zero deviates keep x at 0, so the ceiling is attained.
        let c = cfg(1.3, 1e-3, 2.0, 0.0, 0.5);
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        for _ in 0..c.steps() {
            em_step_with(&mut s, &c, 0.0).unwrap();
        }
        let expect = 0.5f64.ln() + c.p * s.t();
        assert!((s.log_theta() - expect).abs() < 1e-11);
    }

    #[test]
    fn brownian_sign_flip_negates_x_path() {
        let c = cfg(1.0, 1e-2, 3.0, 0.0, 1.0);
        let mut rng = RandomSource::from_seed(8);
        let zs: Vec<f64> = (0..c.steps()).map(|_| rng.standard_normal()).collect();
        let mut a = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut b = DiffusionState::new(c.x0, c.theta0).unwrap();
        for &z in &zs {
            em_step_with(&mut a, &c, z).unwrap();
            em_step_with(&mut b, &c, -z).unwrap();
            assert_eq!(a.x.to_bits(), (-b.x).to_bits());
            assert_eq!(a.log_theta().to_bits(), b.log_theta().to_bits());
        }
    }

    #[test]
    fn theta_blow_up_is_reported() {
        let c = SdeConfig {
            p: 100.0,
            dt: 1.0,
            horizon: 10.0,
            x0: 0.0,
            theta0: 1.0,
            theta_cap: 1e100,
        };
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut err = None;
        for _ in 0..10 {
            if let Err(e) = em_step_with(&mut s, &c, 0.0) {
                err = Some(e);
                break;
            }
        }
        assert!(matches!(err, Some(Error::ThetaBlowUp { .. })));
    }

    #[test]
    fn eta_closed_form_trivial_cases() {
        // X == 0 leaves only the exponential decay of eta0.
        let zeros = vec![0.0; 100];
        let got = eta_closed_form(2.0, 1.5, &zeros, 0.01);
        assert!((got - 2.0 * (-1.5f64).exp()).abs() < 1e-14);
        // t = 0.
        assert_eq!(eta_closed_form(2.0, 1.5, &[], 0.01), 2.0);
    }

    #[test]
    fn theta_closed_form_trivial_cases() {
        let zeros = vec![0.0; 100];
        let got = theta_closed_form(0.5, 1.5, &zeros, 0.01);
        assert!((got - (1.5f64).exp() / 0.5).abs() < 1e-13);
        assert_eq!(theta_closed_form(0.5, 1.5, &[], 0.01), 2.0);
    }

    #[test]
    fn closed_forms_are_reciprocal_along_path() {
        let c = cfg(1.0, 1e-3, 2.0, 0.3, 1.0);
        let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
        let mut rng = RandomSource::from_seed(12);
        let mut abs_x = Vec::new();
        for _ in 0..c.steps() {
            abs_x.push(s.x.abs());
            em_step(&mut s, &c, &mut rng).unwrap();
        }
        let eta0 = 1.0 / c.theta0;
        let e = eta_closed_form(eta0, c.p, &abs_x, c.dt);
        let th = theta_closed_form(eta0, c.p, &abs_x, c.dt);
        assert!((e * th - 1.0).abs() < 1e-10, "product = {}", e * th);
    }

    /// Refine the Brownian path (coarse increment = sum of two fine ones)
    /// and check the closed-form/state eta gap shrinks ~linearly in dt.
    #[test]
    fn eta_closed_form_gap_halves_with_dt() {
        let p = 1.0;
        let horizon = 1.0;
        let mut ratios = Vec::new();
        for seed in 0..10u64 {
            let dt_f = 5e-4;
            let c_fine = cfg(p, dt_f, horizon, 0.2, 1.0);
            let c_coarse = cfg(p, 2.0 * dt_f, horizon, 0.2, 1.0);
            let mut rng = RandomSource::from_seed(100 + seed);
            let n_fine = c_fine.steps() as usize;
            let z_fine: Vec<f64> = (0..n_fine).map(|_| rng.standard_normal()).collect();
            // Coarse deviates reproduce the same Brownian increments.
            let z_coarse: Vec<f64> = z_fine
                .chunks(2)
                .map(|pair| (pair[0] + pair[1]) / std::f64::consts::SQRT_2)
                .collect();

            let gap = |c: &SdeConfig, zs: &[f64]| {
                let mut s = DiffusionState::new(c.x0, c.theta0).unwrap();
                let mut abs_x = Vec::new();
                for &z in zs {
                    abs_x.push(s.x.abs());
                    em_step_with(&mut s, c, z).unwrap();
                }
                let e = eta_closed_form(1.0 / c.theta0, c.p, &abs_x, c.dt);
                (e - s.eta()).abs()
            };
            let g_fine = gap(&c_fine, &z_fine);
            let g_coarse = gap(&c_coarse, &z_coarse);
            if g_fine > 1e-14 {
                ratios.push(g_coarse / g_fine);
            }
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(
            (1.4..=2.9).contains(&mean),
            "expected O(dt) scaling, mean ratio = {mean}, ratios = {ratios:?}"
        );
    }

    #[test]
    fn run_path_snapshots_grid() {
        let c = cfg(1.0, 0.01, 1.0, 0.0, 1.0);
        let mut rng = RandomSource::from_seed(14);
        let pts = run_path(&c, &[0.0, 0.5, 1.0], &mut rng).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].t, 0.0);
        assert!((pts[1].t - 0.5).abs() < 1e-12);
        assert!((pts[2].t - 1.0).abs() < 1e-12);
        assert_eq!(pts[0].x, 0.0);
        assert_eq!(pts[0].theta, 1.0);
    }

    #[test]
    fn run_ensemble_is_deterministic_and_ordered() {
        let c = cfg(1.0, 0.01, 0.5, 0.0, 1.0);
        let a = run_ensemble(&c, &[0.5], 8, 77).unwrap();
        let b = run_ensemble(&c, &[0.5], 8, 77).unwrap();
        for (ra, rb) in a.replicas.iter().zip(&b.replicas) {
            assert_eq!(ra[0].x.to_bits(), rb[0].x.to_bits());
        }
        // Replica r of a larger ensemble matches replica r of a smaller one.
        let big = run_ensemble(&c, &[0.5], 12, 77).unwrap();
        for r in 0..8 {
            assert_eq!(
                a.replicas[r][0].x.to_bits(),
                big.replicas[r][0].x.to_bits()
            );
        }
    }

    #[test]
    fn bad_grid_rejected() {
        let c = cfg(1.0, 0.01, 1.0, 0.0, 1.0);
        let mut rng = RandomSource::from_seed(1);
        assert!(run_path(&c, &[], &mut rng).is_err());
        assert!(run_path(&c, &[0.5, 0.5], &mut rng).is_err());
        assert!(run_path(&c, &[-0.1, 0.5], &mut rng).is_err());
        assert!(run_path(&c, &[0.5, 1.5], &mut rng).is_err(), "beyond horizon");
    }

    #[test]
    fn ensemble_surfaces_blow_up_errors() {
        let c = SdeConfig {
            p: 500.0,
            dt: 1.0,
            horizon: 5.0,
            x0: 0.0,
            theta0: 1.0,
            theta_cap: 1e100,
        };
        assert!(matches!(
            run_ensemble(&c, &[5.0], 4, 1),
            Err(Error::ThetaBlowUp { .. })
        ));
    }
}
