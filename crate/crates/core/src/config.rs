//! Batch experiment configuration.
//!
//! Experiments are described by a TOML document with dotted sections, parsed
//! fail-closed: unknown keys are errors, so a misspelled `p_acc` cannot
//! silently run with defaults. Defaults: `dt = 1e-3`, `p = 1.0`,
//! `p_acc = 0.44`, `epsilon = 1e-3`, `replicas = 1000`.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diffusion::{SdeConfig, DEFAULT_THETA_CAP};
use crate::error::{Error, Result};
use crate::hormander::MollifierParams;
use crate::sampler::{DiscreteAdaptParams, ScaledChainParams};

/// Largest accepted discretization level; beyond this the rescaled
/// displacement `theta eps / sqrt(n)` is dominated by rounding.
pub const N_SCALE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Chain,
    Scaled,
    Sde,
    Moments,
    Hormander,
    Compare,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Chain => "chain",
            Mode::Scaled => "scaled",
            Mode::Sde => "sde",
            Mode::Moments => "moments",
            Mode::Hormander => "hormander",
            Mode::Compare => "compare",
        };
        f.write_str(s)
    }
}

/// Time grid: either explicit points or an evenly spaced span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGridSpec {
    Points { points: Vec<f64> },
    Linspace { start: f64, stop: f64, count: usize },
}

impl TimeGridSpec {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let grid = match self {
            TimeGridSpec::Points { points } => points.clone(),
            TimeGridSpec::Linspace { start, stop, count } => {
                if *count < 2 {
                    return Err(Error::Config(
                        "time_grid.count must be >= 2".into(),
                    ));
                }
                let n = *count as f64 - 1.0;
                (0..*count)
                    .map(|j| start + (stop - start) * j as f64 / n)
                    .collect()
            }
        };
        if grid.is_empty() {
            return Err(Error::Config("time_grid must be nonempty".into()));
        }
        if grid[0] < 0.0 {
            return Err(Error::Config("time_grid must start at t >= 0".into()));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "time_grid must be strictly increasing".into(),
            ));
        }
        Ok(grid)
    }
}

fn d_seed() -> u64 {
    42
}
fn d_replicas() -> u64 {
    1000
}
fn d_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn d_orders() -> Vec<u32> {
    vec![1, 2, 3, 4]
}
fn d_trajectories() -> u64 {
    1
}
fn d_one() -> f64 {
    1.0
}
fn d_p() -> f64 {
    1.0
}
fn d_dt() -> f64 {
    1e-3
}
fn d_sde_horizon() -> f64 {
    50.0
}
fn d_theta_cap() -> f64 {
    DEFAULT_THETA_CAP
}
fn d_p_acc() -> f64 {
    0.44
}
fn d_chain_steps() -> u64 {
    100_000
}
fn d_thin() -> u64 {
    1
}
fn d_rate_window_start() -> u64 {
    10_000
}
fn d_rate_window_end() -> u64 {
    100_000
}
fn d_n_scale() -> u64 {
    10_000
}
fn d_scaled_horizon() -> f64 {
    1.0
}
fn d_max_order() -> u32 {
    40
}
fn d_epsilon() -> f64 {
    1e-3
}
fn d_x_min() -> f64 {
    -2.0
}
fn d_x_max() -> f64 {
    2.0
}
fn d_grid_points() -> usize {
    21
}
fn d_eta_min() -> f64 {
    0.1
}
fn d_eta_max() -> f64 {
    4.0
}
fn d_random_points() -> usize {
    1000
}
fn d_fd_step() -> f64 {
    1e-5
}
fn d_span_tol() -> f64 {
    1e-10
}
fn d_true() -> bool {
    true
}
fn d_n_scales() -> Vec<u64> {
    vec![100, 1000, 10_000]
}
fn d_compare_t() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeSection {
    #[serde(default = "d_p")]
    pub p: f64,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_sde_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "d_one")]
    pub theta0: f64,
    #[serde(default = "d_theta_cap")]
    pub theta_cap: f64,
    /// Also check final-time moments against the closed-form limits.
    #[serde(default)]
    pub check_limiting_moments: bool,
}

impl Default for SdeSection {
    fn default() -> Self {
        Self {
            p: d_p(),
            dt: d_dt(),
            horizon: d_sde_horizon(),
            x0: 0.0,
            theta0: d_one(),
            theta_cap: d_theta_cap(),
            check_limiting_moments: false,
        }
    }
}

impl SdeSection {
    pub fn to_sde_config(&self) -> Result<SdeConfig> {
        let cfg = SdeConfig {
            p: self.p,
            dt: self.dt,
            horizon: self.horizon,
            x0: self.x0,
            theta0: self.theta0,
            theta_cap: self.theta_cap,
        };
        cfg.validate().map_err(|e| prefix_key("sde", e))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    #[serde(default = "d_p_acc")]
    pub p_acc: f64,
    #[serde(default = "d_chain_steps")]
    pub steps: u64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "d_one")]
    pub theta0: f64,
    #[serde(default = "d_thin")]
    pub thin: u64,
    /// Iteration window for the long-run acceptance-rate check.
    #[serde(default = "d_rate_window_start")]
    pub rate_window_start: u64,
    #[serde(default = "d_rate_window_end")]
    pub rate_window_end: u64,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self {
            p_acc: d_p_acc(),
            steps: d_chain_steps(),
            x0: 0.0,
            theta0: d_one(),
            thin: d_thin(),
            rate_window_start: d_rate_window_start(),
            rate_window_end: d_rate_window_end(),
        }
    }
}

impl ChainSection {
    pub fn params(&self) -> Result<DiscreteAdaptParams> {
        DiscreteAdaptParams::new(self.p_acc).map_err(|e| prefix_key("chain", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledSection {
    #[serde(default = "d_n_scale")]
    pub n_scale: u64,
    #[serde(default = "d_p")]
    pub p: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "d_one")]
    pub theta0: f64,
    #[serde(default = "d_scaled_horizon")]
    pub horizon: f64,
    #[serde(default = "d_thin")]
    pub thin: u64,
}

impl Default for ScaledSection {
    fn default() -> Self {
        Self {
            n_scale: d_n_scale(),
            p: d_p(),
            x0: 0.0,
            theta0: d_one(),
            horizon: d_scaled_horizon(),
            thin: d_thin(),
        }
    }
}

impl ScaledSection {
    pub fn params(&self) -> Result<ScaledChainParams> {
        if self.n_scale > N_SCALE_CAP {
            return Err(Error::Config(format!(
                "scaled.n_scale must be <= {N_SCALE_CAP}, got {}",
                self.n_scale
            )));
        }
        ScaledChainParams::new(self.n_scale, self.p).map_err(|e| prefix_key("scaled", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSection {
    /// Highest even moment order to verify (recursion levels k = 1..order/2).
    #[serde(default = "d_max_order")]
    pub max_order: u32,
}

impl Default for MomentsSection {
    fn default() -> Self {
        Self {
            max_order: d_max_order(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HormanderSection {
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[serde(default = "d_p")]
    pub p: f64,
    #[serde(default = "d_x_min")]
    pub x_min: f64,
    #[serde(default = "d_x_max")]
    pub x_max: f64,
    #[serde(default = "d_grid_points")]
    pub x_points: usize,
    #[serde(default = "d_eta_min")]
    pub eta_min: f64,
    #[serde(default = "d_eta_max")]
    pub eta_max: f64,
    #[serde(default = "d_grid_points")]
    pub eta_points: usize,
    #[serde(default = "d_random_points")]
    pub random_points: usize,
    #[serde(default = "d_fd_step")]
    pub fd_step: f64,
    #[serde(default = "d_span_tol")]
    pub span_tol: f64,
    /// Include the drift field in the spanning list (the bracket pair alone
    /// loses rank on the x = 0 line).
    #[serde(default = "d_true")]
    pub include_drift: bool,
}

impl Default for HormanderSection {
    fn default() -> Self {
        Self {
            epsilon: d_epsilon(),
            p: d_p(),
            x_min: d_x_min(),
            x_max: d_x_max(),
            x_points: d_grid_points(),
            eta_min: d_eta_min(),
            eta_max: d_eta_max(),
            eta_points: d_grid_points(),
            random_points: d_random_points(),
            fd_step: d_fd_step(),
            span_tol: d_span_tol(),
            include_drift: true,
        }
    }
}

impl HormanderSection {
    pub fn mollifier(&self) -> Result<MollifierParams> {
        MollifierParams::new(self.epsilon).map_err(|e| prefix_key("hormander", e))
    }

    pub fn validate(&self) -> Result<()> {
        self.mollifier()?;
        if self.x_points < 2 || self.eta_points < 2 {
            return Err(Error::Config(
                "hormander.x_points and hormander.eta_points must be >= 2".into(),
            ));
        }
        let finite = self.eta_min.is_finite()
            && self.eta_max.is_finite()
            && self.x_min.is_finite()
            && self.x_max.is_finite();
        if !finite || self.eta_min <= 0.0 || self.eta_min >= self.eta_max {
            return Err(Error::Config(
                "hormander grid needs 0 < eta_min < eta_max".into(),
            ));
        }
        if self.x_min >= self.x_max {
            return Err(Error::Config("hormander grid needs x_min < x_max".into()));
        }
        if !self.fd_step.is_finite() || self.fd_step <= 0.0 || self.fd_step >= self.eta_min {
            return Err(Error::Config(
                "hormander.fd_step must be positive and smaller than eta_min".into(),
            ));
        }
        if !self.span_tol.is_finite() || self.span_tol <= 0.0 || self.span_tol >= 1.0 {
            return Err(Error::Config(
                "hormander.span_tol must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Discretization levels, strictly increasing.
    #[serde(default = "d_n_scales")]
    pub n_scales: Vec<u64>,
    /// Common comparison time.
    #[serde(default = "d_compare_t")]
    pub t: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            n_scales: d_n_scales(),
            t: d_compare_t(),
        }
    }
}

/// A parsed, not-yet-validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_replicas")]
    pub replicas: u64,
    #[serde(default = "d_out_dir")]
    pub out_dir: PathBuf,
    /// Moment orders tracked by the estimating modes.
    #[serde(default = "d_orders")]
    pub orders: Vec<u32>,
    /// How many replica trajectories to write as CSV.
    #[serde(default = "d_trajectories")]
    pub trajectories: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGridSpec>,
    #[serde(default)]
    pub sde: SdeSection,
    #[serde(default)]
    pub chain: ChainSection,
    #[serde(default)]
    pub scaled: ScaledSection,
    #[serde(default)]
    pub moments: MomentsSection,
    #[serde(default)]
    pub hormander: HormanderSection,
    #[serde(default)]
    pub compare: CompareSection,
}

impl ExperimentConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            seed: d_seed(),
            replicas: d_replicas(),
            out_dir: d_out_dir(),
            orders: d_orders(),
            trajectories: d_trajectories(),
            time_grid: None,
            sde: SdeSection::default(),
            chain: ChainSection::default(),
            scaled: ScaledSection::default(),
            moments: MomentsSection::default(),
            hormander: HormanderSection::default(),
            compare: CompareSection::default(),
        }
    }

    /// Validate every invariant reachable from the selected mode.
    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        let needs_orders = matches!(self.mode, Mode::Sde | Mode::Scaled | Mode::Compare);
        if needs_orders && self.orders.is_empty() {
            return Err(Error::Config(format!(
                "orders must be nonempty in mode {}",
                self.mode
            )));
        }
        if let Some(grid) = &self.time_grid {
            grid.resolve()?;
        }
        match self.mode {
            Mode::Chain => {
                self.chain.params()?;
                if self.chain.thin == 0 {
                    return Err(Error::Config("chain.thin must be >= 1".into()));
                }
                if self.chain.rate_window_start >= self.chain.rate_window_end {
                    return Err(Error::Config(
                        "chain.rate_window_start must be < chain.rate_window_end".into(),
                    ));
                }
                crate::sampler::ChainState::new(self.chain.x0, self.chain.theta0)
                    .map_err(|e| prefix_key("chain", e))?;
            }
            Mode::Scaled => {
                self.scaled.params()?;
                if self.scaled.thin == 0 {
                    return Err(Error::Config("scaled.thin must be >= 1".into()));
                }
                if !self.scaled.horizon.is_finite() || self.scaled.horizon <= 0.0 {
                    return Err(Error::Config("scaled.horizon must be > 0".into()));
                }
                crate::sampler::ChainState::new(self.scaled.x0, self.scaled.theta0)
                    .map_err(|e| prefix_key("scaled", e))?;
            }
            Mode::Sde => {
                self.sde.to_sde_config()?;
            }
            Mode::Moments => {
                if self.moments.max_order < 2 || !self.moments.max_order.is_multiple_of(2) {
                    return Err(Error::Config(
                        "moments.max_order must be an even integer >= 2".into(),
                    ));
                }
            }
            Mode::Hormander => {
                self.hormander.validate()?;
            }
            Mode::Compare => {
                self.sde.to_sde_config()?;
                if !self.orders.contains(&2) {
                    return Err(Error::Config(
                        "orders must include 2 in mode compare (the gap checks run on the \
                         second moment)"
                            .into(),
                    ));
                }
                if self.compare.n_scales.is_empty() {
                    return Err(Error::Config("compare.n_scales must be nonempty".into()));
                }
                if !self.compare.n_scales.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Config(
                        "compare.n_scales must be strictly increasing".into(),
                    ));
                }
                for &n in &self.compare.n_scales {
                    if n > N_SCALE_CAP {
                        return Err(Error::Config(format!(
                            "compare.n_scales entries must be <= {N_SCALE_CAP}, got {n}"
                        )));
                    }
                    ScaledChainParams::new(n, self.sde.p).map_err(|e| prefix_key("compare", e))?;
                }
                if !self.compare.t.is_finite() || self.compare.t <= 0.0 {
                    return Err(Error::Config("compare.t must be > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// The time grid for estimating modes, defaulting to an 11-point span of
    /// `[0, stop]`.
    pub fn resolved_time_grid(&self, stop: f64) -> Result<Vec<f64>> {
        match &self.time_grid {
            Some(spec) => spec.resolve(),
            None => TimeGridSpec::Linspace {
                start: 0.0,
                stop,
                count: 11,
            }
            .resolve(),
        }
    }
}

fn prefix_key(section: &str, e: Error) -> Error {
    match e {
        Error::Config(msg) => Error::Config(format!("{section}.{msg}")),
        other => other,
    }
}

/// Parse a TOML experiment document; unknown keys and type mismatches are
/// reported with the offending key, then invariants are checked.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Serialize a config back to TOML; `parse_config` of the output yields an
/// equal value.
pub fn serialize_config(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sde_document_gets_defaults() {
        let cfg = parse_config("mode = \"sde\"\n").unwrap();
        assert_eq!(cfg.mode, Mode::Sde);
        assert_eq!(cfg.sde.dt, 1e-3);
        assert_eq!(cfg.sde.p, 1.0);
        assert_eq!(cfg.replicas, 1000);
        assert_eq!(cfg.chain.p_acc, 0.44);
        assert_eq!(cfg.hormander.epsilon, 1e-3);
    }

    #[test]
    fn zero_replicas_rejected_with_key_name() {
        let err = parse_config("mode = \"sde\"\nreplicas = 0\n").unwrap_err();
        assert!(err.to_string().contains("replicas must be >= 1"), "{err}");
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(parse_config("mode = \"sde\"\nreplics = 3\n").is_err());
        assert!(parse_config("mode = \"sde\"\n[sde]\np_ac = 0.3\n").is_err());
    }

    #[test]
    fn config_round_trips_through_toml() {
        let doc = r#"
mode = "compare"
seed = 7
replicas = 12
orders = [2, 4]
trajectories = 0

[time_grid]
points = [0.0, 0.5, 1.0]

[sde]
p = 0.7
dt = 0.002
horizon = 1.0
x0 = 0.25
theta0 = 2.0

[compare]
n_scales = [100, 400]
t = 1.0
"#;
        let cfg = parse_config(doc).unwrap();
        let text = serialize_config(&cfg).unwrap();
        let cfg2 = parse_config(&text).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn defaulted_config_round_trips() {
        for mode in [
            Mode::Chain,
            Mode::Scaled,
            Mode::Sde,
            Mode::Moments,
            Mode::Hormander,
            Mode::Compare,
        ] {
            let cfg = ExperimentConfig::with_mode(mode);
            let text = serialize_config(&cfg).unwrap();
            let cfg2 = parse_config(&text).unwrap();
            assert_eq!(cfg, cfg2);
        }
    }

    proptest::proptest! {
        /// serialize -> parse is lossless for arbitrary valid configs,
        /// including floats with no short decimal form.
        #[test]
        fn round_trip_property(
            seed in proptest::prelude::any::<u64>(),
            replicas in 1u64..1_000_000,
            p in 1e-6f64..1e3,
            dt in 1e-6f64..0.5,
            x0 in -1e3f64..1e3,
            theta0 in 1e-6f64..1e3,
            p_acc in 0.01f64..0.99,
            epsilon in 1e-9f64..1.0,
        ) {
            let mut cfg = ExperimentConfig::with_mode(Mode::Sde);
            cfg.seed = seed;
            cfg.replicas = replicas;
            cfg.sde.p = p;
            cfg.sde.dt = dt;
            cfg.sde.horizon = dt * 1000.0;
            cfg.sde.x0 = x0;
            cfg.sde.theta0 = theta0;
            cfg.chain.p_acc = p_acc;
            cfg.hormander.epsilon = epsilon;
            cfg.time_grid = Some(TimeGridSpec::Points {
                points: vec![0.0, dt * 500.0, dt * 1000.0],
            });
            let text = serialize_config(&cfg).unwrap();
            let reparsed = parse_config(&text).unwrap();
            proptest::prop_assert_eq!(cfg, reparsed);
        }
    }

    #[test]
    fn linspace_grid_resolves() {
        let spec = TimeGridSpec::Linspace {
            start: 0.0,
            stop: 2.0,
            count: 5,
        };
        assert_eq!(spec.resolve().unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn bad_grids_rejected() {
        let doc = "mode = \"sde\"\n[time_grid]\npoints = [1.0, 0.5]\n";
        assert!(parse_config(doc).is_err());
        let doc = "mode = \"sde\"\n[time_grid]\nstart = 0.0\nstop = 1.0\ncount = 1\n";
        assert!(parse_config(doc).is_err());
    }

    #[test]
    fn n_scale_cap_enforced() {
        let doc = "mode = \"compare\"\n[compare]\nn_scales = [100, 200000000]\n";
        let err = parse_config(doc).unwrap_err();
        assert!(err.to_string().contains("n_scales"), "{err}");
        let doc = "mode = \"scaled\"\n[scaled]\nn_scale = 200000000\n";
        assert!(parse_config(doc).is_err());
    }

    #[test]
    fn mode_specific_invariants() {
        assert!(parse_config("mode = \"chain\"\n[chain]\np_acc = 1.5\n").is_err());
        assert!(parse_config("mode = \"moments\"\n[moments]\nmax_order = 7\n").is_err());
        assert!(parse_config("mode = \"sde\"\norders = []\n").is_err());
        assert!(
            parse_config("mode = \"moments\"\norders = []\n").is_ok(),
            "orders are not used by the recursion mode"
        );
        let err = parse_config("mode = \"compare\"\norders = [4]\n").unwrap_err();
        assert!(err.to_string().contains("orders must include 2"), "{err}");
    }
}
