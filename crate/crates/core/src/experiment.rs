//! Batch experiment drivers behind the `amcmc` binary.
//!
//! Each mode runs its simulations, writes CSV artifacts plus `report.json`
//! into the output directory, and contributes named checks to
//! `verdict.json`. Every output byte is determined by (config, seed) except
//! the wall-clock stamp, which is confined to `meta.json`. Floats are
//! written with 17 significant digits.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, Mode};
use crate::diffusion::{run_ensemble, PathEnsemble, SdeConfig};
use crate::error::Result;
use crate::hormander::{
    field_a0, field_a1, lie_bracket_closed, lie_bracket_fd, pair_determinant, span_check,
    VectorField2,
};
use crate::moments::{
    batch_means, check_eta_moment_bound, check_martingale_zero_mean,
    check_pathwise_timeaverage, check_theta_growth_ensemble, check_theta_growth_pathwise,
    check_timeaverage_theta_power, check_uniform_second_moment, estimate_moments, even_recursion,
    limiting_moment, odd_recursion, BoundFlag, GridSamples, MomentReport,
};
use crate::rng::RandomSource;
use crate::sampler::{
    run_chain, step_discrete, step_scaled, ChainParams, ChainState, ScaledChainParams,
    TrajectoryRecord,
};
use crate::targets::TargetDensity;

/// Acceptance band for the long-run acceptance-rate check.
pub const ACCEPTANCE_RATE_BAND: f64 = 0.05;
/// Closed-form bracket must match the finite-difference oracle this tightly.
pub const FD_MATCH_RTOL: f64 = 1e-5;
/// Minimum fraction of paths that must satisfy the time-average inequality.
pub const TIMEAVG_MIN_FRACTION: f64 = 0.99;
/// Absolute tolerance floors for limiting-moment checks (used when larger
/// than 3 SE).
pub const MOMENT_TOL_FLOOR_R2: f64 = 0.05;
pub const MOMENT_TOL_FLOOR_R4: f64 = 0.3;

/// Machine-readable outcome of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub mode: String,
    pub checks: Vec<BoundFlag>,
    pub all_pass: bool,
}

impl Verdict {
    fn new(mode: Mode, checks: Vec<BoundFlag>) -> Self {
        let all_pass = checks.iter().all(|c| c.pass);
        Self {
            mode: mode.to_string(),
            checks,
            all_pass,
        }
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

fn write_trajectory_csv(path: &Path, records: &[TrajectoryRecord]) -> Result<()> {
    write_lines(
        path,
        "t,x,theta,xi",
        records.iter().map(|r| {
            format!(
                "{},{},{},{}",
                fmt_f64(r.t),
                fmt_f64(r.x),
                fmt_f64(r.theta),
                u8::from(r.xi)
            )
        }),
    )
}

fn write_path_csv(path: &Path, ensemble: &PathEnsemble, replica: usize) -> Result<()> {
    write_lines(
        path,
        "t,x,theta,eta",
        ensemble.replicas[replica].iter().map(|p| {
            format!(
                "{},{},{},{}",
                fmt_f64(p.t),
                fmt_f64(p.x),
                fmt_f64(p.theta),
                fmt_f64(p.eta)
            )
        }),
    )
}

#[derive(Debug, Clone, Serialize)]
struct MomentRow {
    order: u32,
    t: f64,
    estimate: f64,
    se: f64,
    target: f64,
    pass: bool,
}

fn moment_tol_floor(order: u32) -> f64 {
    match order {
        2 => MOMENT_TOL_FLOOR_R2,
        4 => MOMENT_TOL_FLOOR_R4,
        _ => 0.0,
    }
}

fn moment_rows(report: &MomentReport) -> Vec<MomentRow> {
    let mut rows = Vec::new();
    for &order in &report.orders {
        let target = limiting_moment(order).to_f64().unwrap_or(f64::INFINITY);
        for (j, &t) in report.times.iter().enumerate() {
            let m = report.moment(order, j);
            let tol = moment_tol_floor(order).max(3.0 * m.std_error);
            rows.push(MomentRow {
                order,
                t,
                estimate: m.estimate,
                se: m.std_error,
                target,
                pass: (m.estimate - target).abs() <= tol,
            });
        }
    }
    rows
}

fn write_moment_csv(path: &Path, rows: &[MomentRow]) -> Result<()> {
    write_lines(
        path,
        "order,t,estimate,se,target,pass",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.order,
                fmt_f64(r.t),
                fmt_f64(r.estimate),
                fmt_f64(r.se),
                fmt_f64(r.target),
                r.pass
            )
        }),
    )
}

/// Final-time limiting-moment checks: `|estimate - limit| <= max(floor, 3 SE)`.
pub fn limiting_moment_flags(report: &MomentReport) -> Vec<BoundFlag> {
    let last = report.times.len() - 1;
    report
        .orders
        .iter()
        .map(|&order| {
            let m = report.moment(order, last);
            let target = limiting_moment(order).to_f64().unwrap_or(f64::INFINITY);
            let tol = moment_tol_floor(order).max(3.0 * m.std_error);
            let gap = (m.estimate - target).abs();
            BoundFlag {
                name: format!("limiting_moment_r{order}"),
                pass: gap <= tol,
                margin: tol - gap,
                details: format!(
                    "estimate {:.6} vs limit {target} (tol {tol:.4}) at t = {}",
                    m.estimate, report.times[last]
                ),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// sde mode

fn sde_driver(cfg: &ExperimentConfig, out: &Path) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let sde_cfg = cfg.sde.to_sde_config()?;
    let grid = cfg.resolved_time_grid(sde_cfg.horizon)?;
    let ensemble = run_ensemble(&sde_cfg, &grid, cfg.replicas, cfg.seed)?;

    for r in 0..cfg.trajectories.min(cfg.replicas) as usize {
        write_path_csv(&out.join(format!("trajectory_{r}.csv")), &ensemble, r)?;
    }

    let report = estimate_moments(&ensemble.samples_of(|p| p.x), &cfg.orders)?;
    let rows = moment_rows(&report);
    write_moment_csv(&out.join("moments.csv"), &rows)?;

    let mut checks = vec![
        check_uniform_second_moment(&report, sde_cfg.x0 * sde_cfg.x0)?,
        check_theta_growth_pathwise(&ensemble, sde_cfg.theta0, sde_cfg.p)?,
        check_theta_growth_ensemble(&ensemble, sde_cfg.theta0, sde_cfg.p)?,
        check_pathwise_timeaverage(
            &ensemble,
            sde_cfg.theta0,
            sde_cfg.p,
            sde_cfg.dt,
            TIMEAVG_MIN_FRACTION,
        )?,
        check_martingale_zero_mean(&ensemble)?,
        check_timeaverage_theta_power(&ensemble, 2)?,
        check_eta_moment_bound(&ensemble, 1.0 / sde_cfg.theta0, sde_cfg.p)?,
    ];
    if cfg.sde.check_limiting_moments {
        checks.extend(limiting_moment_flags(&report));
    }

    let report_json = json!({
        "mode": "sde",
        "replicas": cfg.replicas,
        "grid": ensemble.times,
        "moments": rows,
    });
    Ok((checks, report_json))
}

// ---------------------------------------------------------------------------
// chain mode

struct ChainRunOutput {
    rate: f64,
    window_xi: Vec<f64>,
    trajectory: Option<Vec<TrajectoryRecord>>,
}

fn chain_driver(cfg: &ExperimentConfig, out: &Path) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let section = &cfg.chain;
    let params = section.params()?;
    let target = TargetDensity::standard_normal();
    let steps = section.steps;
    let win_lo = section.rate_window_start.min(steps);
    let win_hi = section.rate_window_end.min(steps);

    let runs: Vec<Result<ChainRunOutput>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomSource::for_replica(cfg.seed, r);
            let mut state = ChainState::new(section.x0, section.theta0)?;
            let keep_trajectory = r < cfg.trajectories;
            let keep_window_xi = r == 0;
            let mut trajectory = keep_trajectory.then(|| {
                let mut v = Vec::with_capacity((steps / section.thin + 1) as usize);
                v.push(TrajectoryRecord {
                    t: 0.0,
                    x: state.x,
                    theta: state.theta,
                    xi: state.xi,
                });
                v
            });
            let mut window_xi = Vec::new();
            let mut accepted = 0u64;
            for i in 1..=steps {
                state = step_discrete(&state, &params, &target, &mut rng)?;
                // Window indices are iteration counts after the step.
                if i > win_lo && i <= win_hi {
                    if state.xi {
                        accepted += 1;
                    }
                    if keep_window_xi {
                        window_xi.push(state.xi_indicator());
                    }
                }
                if let Some(tr) = trajectory.as_mut() {
                    if i.is_multiple_of(section.thin) {
                        tr.push(TrajectoryRecord {
                            t: state.n as f64,
                            x: state.x,
                            theta: state.theta,
                            xi: state.xi,
                        });
                    }
                }
            }
            let span = win_hi.saturating_sub(win_lo);
            let rate = if span > 0 {
                accepted as f64 / span as f64
            } else {
                f64::NAN
            };
            Ok(ChainRunOutput {
                rate,
                window_xi,
                trajectory,
            })
        })
        .collect();

    let mut rates = Vec::with_capacity(runs.len());
    let mut window_xi0 = Vec::new();
    for (r, run) in runs.into_iter().enumerate() {
        let run = run?;
        rates.push(run.rate);
        if r == 0 {
            window_xi0 = run.window_xi;
        }
        if let Some(tr) = run.trajectory {
            write_trajectory_csv(&out.join(format!("trajectory_{r}.csv")), &tr)?;
        }
    }

    let mut checks = Vec::new();
    let window_complete = win_hi > win_lo && section.rate_window_end <= steps;
    let (pooled_rate, rate_se) = if cfg.replicas >= 2 {
        let n = rates.len();
        let mean = rates.iter().sum::<f64>() / n as f64;
        let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        (mean, (var / n as f64).sqrt())
    } else if window_xi0.len() >= 60 {
        let est = batch_means(&window_xi0, 30)?;
        (est.estimate, est.std_error)
    } else {
        (rates[0], f64::NAN)
    };
    if window_complete {
        let gap = (pooled_rate - section.p_acc).abs();
        checks.push(BoundFlag {
            name: "acceptance_rate_in_band".into(),
            pass: gap <= ACCEPTANCE_RATE_BAND,
            margin: ACCEPTANCE_RATE_BAND - gap,
            details: format!(
                "rate {pooled_rate:.4} over iterations {win_lo}..{win_hi} vs p_acc {}",
                section.p_acc
            ),
        });
    }

    let report_json = json!({
        "mode": "chain",
        "replicas": cfg.replicas,
        "steps": steps,
        "p_acc": section.p_acc,
        "rate_window": [win_lo, win_hi],
        "acceptance_rate": pooled_rate,
        "acceptance_rate_se": rate_se,
    });
    Ok((checks, report_json))
}

// ---------------------------------------------------------------------------
// scaled mode and compare mode

struct ScaledGridEnsemble {
    times: Vec<f64>,
    x: Vec<Vec<f64>>,
}

/// Snapshot the rescaled chain at grid times. Replica `r` uses random
/// stream `stream_offset + r`.
fn run_scaled_grid_ensemble(
    params: &ScaledChainParams,
    init: ChainState,
    grid: &[f64],
    replicas: u64,
    seed: u64,
    stream_offset: u64,
    target: &TargetDensity,
) -> Result<ScaledGridEnsemble> {
    let n = params.n_scale as f64;
    let steps_at: Vec<u64> = grid.iter().map(|&t| (t * n).round() as u64).collect();
    let total = *steps_at.last().unwrap_or(&0);
    let rows: Vec<Result<Vec<f64>>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RandomSource::for_replica(seed, stream_offset + r);
            let mut state = init;
            let mut xs = Vec::with_capacity(steps_at.len());
            let mut next = 0;
            while next < steps_at.len() && steps_at[next] == 0 {
                xs.push(state.x);
                next += 1;
            }
            for step in 1..=total {
                state = step_scaled(&state, params, target, &mut rng)?;
                while next < steps_at.len() && steps_at[next] == step {
                    xs.push(state.x);
                    next += 1;
                }
            }
            Ok(xs)
        })
        .collect();
    let mut x = Vec::with_capacity(rows.len());
    for row in rows {
        x.push(row?);
    }
    Ok(ScaledGridEnsemble {
        times: steps_at.iter().map(|&s| s as f64 / n).collect(),
        x,
    })
}

fn scaled_driver(
    cfg: &ExperimentConfig,
    out: &Path,
) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let section = &cfg.scaled;
    let params = section.params()?;
    let target = TargetDensity::standard_normal();
    let grid = cfg.resolved_time_grid(section.horizon)?;
    if grid.last().copied().unwrap_or(0.0) > section.horizon + 0.5 * params.dt() {
        return Err(crate::error::Error::Config(format!(
            "time_grid must stay within scaled.horizon = {}",
            section.horizon
        )));
    }

    let init = ChainState::new(section.x0, section.theta0)?;
    let ensemble =
        run_scaled_grid_ensemble(&params, init, &grid, cfg.replicas, cfg.seed, 0, &target)?;

    let steps = (section.horizon * params.n_scale as f64).round() as u64;
    for r in 0..cfg.trajectories.min(cfg.replicas) {
        let mut rng = RandomSource::for_replica(cfg.seed, r);
        let init = ChainState::new(section.x0, section.theta0)?;
        let records = run_chain(
            init,
            &ChainParams::Scaled(params),
            &target,
            steps,
            section.thin,
            &mut rng,
        )?;
        write_trajectory_csv(&out.join(format!("trajectory_{r}.csv")), &records)?;
    }

    let samples = GridSamples {
        times: ensemble.times.clone(),
        per_replica: ensemble.x.clone(),
    };
    let report = estimate_moments(&samples, &cfg.orders)?;
    let rows = moment_rows(&report);
    write_moment_csv(&out.join("moments.csv"), &rows)?;

    let report_json = json!({
        "mode": "scaled",
        "replicas": cfg.replicas,
        "n_scale": params.n_scale,
        "p": params.p,
        "grid": ensemble.times,
        "moments": rows,
    });
    Ok((Vec::new(), report_json))
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow {
    order: u32,
    n_scale: u64,
    chain_estimate: f64,
    chain_se: f64,
    sde_estimate: f64,
    sde_se: f64,
    gap: f64,
    combined_se: f64,
}

fn compare_driver(
    cfg: &ExperimentConfig,
    out: &Path,
) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let t = cfg.compare.t;
    let sde_cfg = SdeConfig {
        horizon: t,
        ..cfg.sde.to_sde_config()?
    };
    sde_cfg.validate()?;
    let target = TargetDensity::standard_normal();
    let grid = [t];

    let sde_ens = run_ensemble(&sde_cfg, &grid, cfg.replicas, cfg.seed)?;
    let sde_report = estimate_moments(&sde_ens.samples_of(|p| p.x), &cfg.orders)?;

    let mut rows: Vec<CompareRow> = Vec::new();
    for (level, &n_scale) in cfg.compare.n_scales.iter().enumerate() {
        let params = ScaledChainParams::new(n_scale, sde_cfg.p)?;
        // Chain replicas draw from stream blocks disjoint from the SDE's.
        let offset = (level as u64 + 1) * cfg.replicas;
        let init = ChainState::new(sde_cfg.x0, sde_cfg.theta0)?;
        let chain_ens = run_scaled_grid_ensemble(
            &params,
            init,
            &grid,
            cfg.replicas,
            cfg.seed,
            offset,
            &target,
        )?;
        let samples = GridSamples {
            times: chain_ens.times.clone(),
            per_replica: chain_ens.x,
        };
        let chain_report = estimate_moments(&samples, &cfg.orders)?;
        for &order in &cfg.orders {
            let c = chain_report.moment(order, 0);
            let s = sde_report.moment(order, 0);
            rows.push(CompareRow {
                order,
                n_scale,
                chain_estimate: c.estimate,
                chain_se: c.std_error,
                sde_estimate: s.estimate,
                sde_se: s.std_error,
                gap: (c.estimate - s.estimate).abs(),
                combined_se: (c.std_error * c.std_error + s.std_error * s.std_error).sqrt(),
            });
        }
    }

    write_lines(
        &out.join("compare.csv"),
        "order,n_scale,chain_estimate,chain_se,sde_estimate,sde_se,gap,combined_se",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{}",
                r.order,
                r.n_scale,
                fmt_f64(r.chain_estimate),
                fmt_f64(r.chain_se),
                fmt_f64(r.sde_estimate),
                fmt_f64(r.sde_se),
                fmt_f64(r.gap),
                fmt_f64(r.combined_se)
            )
        }),
    )?;

    // Checks on the second moment: agreement at the finest level and a
    // non-increasing gap across levels, both with 3-SE allowances.
    let r2: Vec<&CompareRow> = rows.iter().filter(|r| r.order == 2).collect();
    let finest = r2.last().expect("config validation requires order 2");
    let mut checks = vec![BoundFlag {
        name: "compare_gap_r2_finest".into(),
        pass: finest.gap <= 3.0 * finest.combined_se,
        margin: 3.0 * finest.combined_se - finest.gap,
        details: format!(
            "gap {:.5} vs 3 x combined SE {:.5} at n_scale = {}",
            finest.gap,
            3.0 * finest.combined_se,
            finest.n_scale
        ),
    }];
    let mut monotone = true;
    let mut worst_margin = f64::INFINITY;
    for pair in r2.windows(2) {
        let allow = 3.0
            * (pair[0].combined_se * pair[0].combined_se
                + pair[1].combined_se * pair[1].combined_se)
                .sqrt();
        let margin = pair[0].gap + allow - pair[1].gap;
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 {
            monotone = false;
        }
    }
    checks.push(BoundFlag {
        name: "compare_monotone_r2".into(),
        pass: monotone,
        margin: worst_margin,
        details: format!(
            "gaps {:?} across n_scales {:?}",
            r2.iter().map(|r| r.gap).collect::<Vec<_>>(),
            cfg.compare.n_scales
        ),
    });

    let report_json = json!({
        "mode": "compare",
        "replicas": cfg.replicas,
        "t": t,
        "rows": rows,
    });
    Ok((checks, report_json))
}

// ---------------------------------------------------------------------------
// moments mode

fn moments_driver(
    cfg: &ExperimentConfig,
    out: &Path,
) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let k_max = cfg.moments.max_order / 2;
    let mut even_ok = true;
    let mut odd_ok = true;
    let mut limits = Vec::new();
    for k in 1..=k_max {
        let inputs: Vec<_> = (0..k).map(|m| limiting_moment(2 * m)).collect();
        let table = even_recursion(k, &inputs)?;
        if table.final_even_moment() != limiting_moment(2 * k) {
            even_ok = false;
        }
        let odd = odd_recursion(k)?;
        if odd.iter().any(|v| !num_traits::Zero::is_zero(v)) {
            odd_ok = false;
        }
        limits.push((2 * k, limiting_moment(2 * k)));
    }

    write_lines(
        &out.join("moment_limits.csv"),
        "order,limit",
        limits.iter().map(|(o, l)| format!("{o},{l}")),
    )?;

    let checks = vec![
        BoundFlag {
            name: "even_recursion_exact".into(),
            pass: even_ok,
            margin: 0.0,
            details: format!("k = 1..{k_max}, exact rational arithmetic"),
        },
        BoundFlag {
            name: "odd_recursion_zero".into(),
            pass: odd_ok,
            margin: 0.0,
            details: format!("k = 1..{k_max}, exact rational arithmetic"),
        },
    ];

    let report_json = json!({
        "mode": "moments",
        "max_order": cfg.moments.max_order,
        "limits": limits
            .iter()
            .map(|(o, l)| json!({"order": o, "limit": l.to_string()}))
            .collect::<Vec<_>>(),
    });
    Ok((checks, report_json))
}

// ---------------------------------------------------------------------------
// hormander mode

fn hormander_driver(
    cfg: &ExperimentConfig,
    out: &Path,
) -> Result<(Vec<BoundFlag>, serde_json::Value)> {
    let section = &cfg.hormander;
    section.validate()?;
    let moll = section.mollifier()?;
    let a0 = field_a0(section.p, moll);
    let a1 = field_a1();
    let bracket = lie_bracket_closed(section.p, moll);
    let fields: Vec<VectorField2> = if section.include_drift {
        vec![a0.clone(), a1.clone(), bracket.clone()]
    } else {
        vec![a1.clone(), bracket.clone()]
    };

    let lin = |lo: f64, hi: f64, n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let mut rows = Vec::with_capacity(section.x_points * section.eta_points);
    let mut all_rank2 = true;
    let mut min_ratio = f64::INFINITY;
    for i in 0..section.x_points {
        let x = lin(section.x_min, section.x_max, section.x_points, i);
        for j in 0..section.eta_points {
            let eta = lin(section.eta_min, section.eta_max, section.eta_points, j);
            let det = pair_determinant(&a1, &bracket, (x, eta))?;
            let span = span_check(&fields, (x, eta), section.span_tol)?;
            all_rank2 &= span.rank2;
            min_ratio = min_ratio.min(span.smin_ratio);
            rows.push(format!(
                "{},{},{},{},{}",
                fmt_f64(x),
                fmt_f64(eta),
                fmt_f64(det),
                fmt_f64(span.smin_ratio),
                span.rank2
            ));
        }
    }
    write_lines(
        &out.join("hormander.csv"),
        "x,eta,det,smin_ratio,rank2",
        rows.into_iter(),
    )?;

    // Finite-difference oracle over a random cloud.
    let mut rng = RandomSource::for_replica(cfg.seed, 0);
    let mut worst_rel = 0.0f64;
    for _ in 0..section.random_points {
        let x = section.x_min + (section.x_max - section.x_min) * rng.uniform();
        let eta = section.eta_min + (section.eta_max - section.eta_min) * rng.uniform();
        let (f1, f2) = lie_bracket_fd(&a0, &a1, (x, eta), section.fd_step)?;
        let (c1, c2) = bracket.eval(x, eta)?;
        let num = ((f1 - c1).powi(2) + (f2 - c2).powi(2)).sqrt();
        let den = (c1 * c1 + c2 * c2).sqrt().max(1e-30);
        worst_rel = worst_rel.max(num / den);
    }

    let checks = vec![
        BoundFlag {
            name: "span_rank2_grid".into(),
            pass: all_rank2,
            margin: min_ratio - section.span_tol,
            details: format!(
                "{} x {} grid, min smin_ratio {min_ratio:.3e}, drift field {}",
                section.x_points,
                section.eta_points,
                if section.include_drift { "included" } else { "excluded" }
            ),
        },
        BoundFlag {
            name: "bracket_fd_match".into(),
            pass: worst_rel <= FD_MATCH_RTOL,
            margin: FD_MATCH_RTOL - worst_rel,
            details: format!(
                "worst relative mismatch {worst_rel:.3e} over {} random points",
                section.random_points
            ),
        },
    ];

    let report_json = json!({
        "mode": "hormander",
        "epsilon": section.epsilon,
        "p": section.p,
        "min_smin_ratio": min_ratio,
        "worst_fd_rel_err": worst_rel,
    });
    Ok((checks, report_json))
}

// ---------------------------------------------------------------------------

/// Run one experiment: dispatch on mode, write artifacts, return the verdict.
/// The process exit status should be zero iff `verdict.all_pass`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Verdict> {
    cfg.validate()?;
    let out = cfg.out_dir.clone();
    fs::create_dir_all(&out)?;

    let (checks, report_json) = match cfg.mode {
        Mode::Sde => sde_driver(cfg, &out)?,
        Mode::Chain => chain_driver(cfg, &out)?,
        Mode::Scaled => scaled_driver(cfg, &out)?,
        Mode::Moments => moments_driver(cfg, &out)?,
        Mode::Hormander => hormander_driver(cfg, &out)?,
        Mode::Compare => compare_driver(cfg, &out)?,
    };

    let verdict = Verdict::new(cfg.mode, checks);
    fs::write(
        out.join("verdict.json"),
        serde_json::to_string_pretty(&verdict).expect("verdict serializes") + "\n",
    )?;
    fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report_json).expect("report serializes") + "\n",
    )?;
    fs::write(
        out.join("config_echo.toml"),
        crate::config::serialize_config(cfg)?,
    )?;
    // Wall-clock information lives here and nowhere else.
    let meta = json!({
        "tool": "amcmc",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": cfg.mode.to_string(),
        "seed": cfg.seed,
        "created_unix_secs": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    });
    fs::write(
        out.join("meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n",
    )?;
    Ok(verdict)
}
