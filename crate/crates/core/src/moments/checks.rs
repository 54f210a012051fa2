//! Bound checkers: each one turns a simulated ensemble (or a report derived
//! from it) into a named pass/fail flag with the worst margin observed.
//!
//! Statistical checks pass at 3 standard errors. Pathwise checks on theta
//! growth are exact (no tolerance): the log-space integrator caps every log
//! increment at `p * dt`. The time-average inequality is checked with a
//! discretization allowance of `PATHWISE_SLACK_COEFF * dt * (1 + theta0)`,
//! and sup-over-t statements are operationalized as non-growth over the
//! second half of the horizon (a proxy, reported as such).

use serde::{Deserialize, Serialize};

use crate::diffusion::{PathEnsemble, PathPoint, SQRT_2PI};
use crate::error::{Error, Result};
use crate::moments::estimate::{MomentReport, NeumaierSum};

/// Slack coefficient for the pathwise time-average inequality.
pub const PATHWISE_SLACK_COEFF: f64 = 10.0;

/// Outcome of a single bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFlag {
    pub name: String,
    pub pass: bool,
    /// Worst slack observed (bound minus value); negative means violated.
    pub margin: f64,
    pub details: String,
}

impl BoundFlag {
    fn new(name: &str, pass: bool, margin: f64, details: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            margin,
            details,
        }
    }
}

fn mean_with_se(values: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let mut sum = NeumaierSum::default();
    let mut buf = Vec::with_capacity(n);
    for v in values {
        sum.add(v);
        buf.push(v);
    }
    let mean = sum.total() / n as f64;
    let se = if n >= 2 {
        let mut sq = NeumaierSum::default();
        for v in &buf {
            let d = v - mean;
            sq.add(d * d);
        }
        (sq.total() / (n as f64 - 1.0)).max(0.0).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };
    (mean, se)
}

/// `E(X_t^2) <= E(X_0^2) + 1` at every grid time, with a 3-SE allowance on
/// the estimate.
pub fn check_uniform_second_moment(report: &MomentReport, x0_sq: f64) -> Result<BoundFlag> {
    let mut worst = f64::INFINITY;
    let mut worst_t = f64::NAN;
    for j in 0..report.times.len() {
        let m = report
            .get(2, j)
            .ok_or_else(|| Error::Config("order-2 estimates missing from report".into()))?;
        let margin = x0_sq + 1.0 + 3.0 * m.std_error - m.estimate;
        if margin < worst {
            worst = margin;
            worst_t = report.times[j];
        }
    }
    Ok(BoundFlag::new(
        "uniform_second_moment",
        worst >= 0.0,
        worst,
        format!("worst margin {worst:.4e} at t = {worst_t}"),
    ))
}

/// Exact pathwise ceiling `log theta_t - log theta_0 <= p t`, checked on
/// every replica at every grid time with zero tolerance.
pub fn check_theta_growth_pathwise(
    ensemble: &PathEnsemble,
    theta0: f64,
    p: f64,
) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let log_theta0 = theta0.ln();
    let mut worst = f64::INFINITY;
    let mut violations = 0usize;
    let mut total = 0usize;
    for path in &ensemble.replicas {
        for pt in path {
            let margin = log_theta0 + p * pt.t - pt.log_theta;
            total += 1;
            if margin < 0.0 {
                violations += 1;
            }
            worst = worst.min(margin);
        }
    }
    Ok(BoundFlag::new(
        "theta_growth_pathwise",
        violations == 0,
        worst,
        format!("{violations} violations across {total} path-time points"),
    ))
}

/// Ensemble variant `E(theta_t^2) <= theta_0^2 e^{2pt}`, with 3-SE allowance.
pub fn check_theta_growth_ensemble(
    ensemble: &PathEnsemble,
    theta0: f64,
    p: f64,
) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = ensemble.replicas.len();
    let mut worst = f64::INFINITY;
    let mut worst_t = f64::NAN;
    for j in 0..ensemble.times.len() {
        let (mean, se) = mean_with_se(
            ensemble.replicas.iter().map(|p| p[j].theta * p[j].theta),
            n,
        );
        let bound = theta0 * theta0 * (2.0 * p * ensemble.times[j]).exp();
        let margin = bound + 3.0 * se - mean;
        if margin < worst {
            worst = margin;
            worst_t = ensemble.times[j];
        }
    }
    Ok(BoundFlag::new(
        "theta_growth_ensemble",
        worst >= 0.0,
        worst,
        format!("worst margin {worst:.4e} at t = {worst_t}"),
    ))
}

/// Evaluate the time-average inequality at one path point:
///
/// ```text
/// (1/t) int |X| theta du <= sqrt(2 pi) p + (1/t) int |X| du
///                           + sqrt(2 pi) log(1 + theta_0) / t
/// ```
///
/// Returns `(pass_with_slack, raw_overshoot)`, the overshoot measured
/// without the discretization slack.
pub fn pathwise_timeaverage_point(
    pt: &PathPoint,
    theta0: f64,
    p: f64,
    dt: f64,
    slack_coeff: f64,
) -> Result<(bool, f64)> {
    if pt.t <= 0.0 {
        return Err(Error::ZeroTime);
    }
    let lhs = pt.int_abs_x_theta / pt.t;
    let rhs = SQRT_2PI * p + pt.int_abs_x / pt.t + SQRT_2PI * (1.0 + theta0).ln() / pt.t;
    let slack = slack_coeff * dt * (1.0 + theta0);
    Ok((lhs <= rhs + slack, (lhs - rhs).max(0.0)))
}

/// Time-average inequality across the ensemble at the final grid time;
/// passes when at least `min_fraction` of paths satisfy it with slack.
pub fn check_pathwise_timeaverage(
    ensemble: &PathEnsemble,
    theta0: f64,
    p: f64,
    dt: f64,
    min_fraction: f64,
) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let last = ensemble.times.len() - 1;
    let mut passed = 0usize;
    let mut worst_overshoot = 0.0f64;
    for path in &ensemble.replicas {
        let (ok, overshoot) =
            pathwise_timeaverage_point(&path[last], theta0, p, dt, PATHWISE_SLACK_COEFF)?;
        if ok {
            passed += 1;
        }
        worst_overshoot = worst_overshoot.max(overshoot);
    }
    let fraction = passed as f64 / ensemble.replicas.len() as f64;
    Ok(BoundFlag::new(
        "pathwise_timeaverage",
        fraction >= min_fraction,
        fraction - min_fraction,
        format!(
            "{passed}/{} paths within slack at t = {:.3}; worst raw overshoot {worst_overshoot:.4e}",
            ensemble.replicas.len(),
            ensemble.times[last],
        ),
    ))
}

/// Cross-replica mean of the accumulated stochastic integral stays within
/// 3 SE of zero at every grid time.
pub fn check_martingale_zero_mean(ensemble: &PathEnsemble) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = ensemble.replicas.len();
    let mut worst = f64::INFINITY;
    let mut worst_t = f64::NAN;
    for j in 0..ensemble.times.len() {
        let (mean, se) = mean_with_se(ensemble.replicas.iter().map(|p| p[j].stoch_int), n);
        let margin = 3.0 * se - mean.abs();
        if margin < worst {
            worst = margin;
            worst_t = ensemble.times[j];
        }
    }
    Ok(BoundFlag::new(
        "martingale_zero_mean",
        worst >= 0.0,
        worst,
        format!("worst |mean| vs 3 SE margin {worst:.4e} at t = {worst_t}"),
    ))
}

/// Boundedness proxy for `(1/t) int E(theta_u^{k/2}) du`: the running
/// time-average (trapezoid over the grid) must not grow over the second
/// half of the horizon, i.e. max over the second half <= 1.5 x its median.
pub fn check_timeaverage_theta_power(ensemble: &PathEnsemble, k: u32) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = ensemble.replicas.len();
    let times = &ensemble.times;
    if times.len() < 4 {
        return Err(Error::Config(
            "theta-power time average needs at least 4 grid times".into(),
        ));
    }
    let half_power = k as f64 / 2.0;
    let means: Vec<f64> = (0..times.len())
        .map(|j| {
            mean_with_se(
                ensemble.replicas.iter().map(|p| p[j].theta.powf(half_power)),
                n,
            )
            .0
        })
        .collect();
    // Running trapezoid average of the grid means.
    let mut averages = Vec::new();
    let mut integral = 0.0;
    for j in 1..times.len() {
        integral += 0.5 * (means[j - 1] + means[j]) * (times[j] - times[j - 1]);
        if times[j] > 0.0 {
            averages.push(integral / times[j]);
        }
    }
    let half = averages.len() / 2;
    let mut second_half: Vec<f64> = averages[half..].to_vec();
    second_half.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max = *second_half.last().unwrap();
    let median = if second_half.len() % 2 == 1 {
        second_half[second_half.len() / 2]
    } else {
        0.5 * (second_half[second_half.len() / 2 - 1] + second_half[second_half.len() / 2])
    };
    let pass = max <= 1.5 * median;
    Ok(BoundFlag::new(
        &format!("timeaverage_theta_power_k{k}"),
        pass,
        1.5 * median - max,
        format!("second-half max {max:.4} vs 1.5 x median {:.4}", 1.5 * median),
    ))
}

/// Ensemble eta bound derived from the moment analysis:
/// `E(eta_t^2) <= 2 (eta_0^2 + (1/(p sqrt(2 pi)))^2 max_t E(X_t^2))`
/// with a 3-SE allowance, the sup replaced by the empirical max.
pub fn check_eta_moment_bound(ensemble: &PathEnsemble, eta0: f64, p: f64) -> Result<BoundFlag> {
    if ensemble.replicas.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = ensemble.replicas.len();
    let sup_x2 = (0..ensemble.times.len())
        .map(|j| mean_with_se(ensemble.replicas.iter().map(|p| p[j].x * p[j].x), n).0)
        .fold(0.0f64, f64::max);
    let bound_core = 2.0 * (eta0 * eta0 + (1.0 / (p * SQRT_2PI)).powi(2) * sup_x2);
    let mut worst = f64::INFINITY;
    let mut worst_t = f64::NAN;
    for j in 0..ensemble.times.len() {
        let (mean, se) = mean_with_se(ensemble.replicas.iter().map(|p| p[j].eta * p[j].eta), n);
        let margin = bound_core + 3.0 * se - mean;
        if margin < worst {
            worst = margin;
            worst_t = ensemble.times[j];
        }
    }
    Ok(BoundFlag::new(
        "eta_moment_bound",
        worst >= 0.0,
        worst,
        format!("worst margin {worst:.4e} at t = {worst_t}"),
    ))
}
