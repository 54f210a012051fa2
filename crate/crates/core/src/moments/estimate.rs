//! Cross-replica moment estimation with compensated summation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator; reduction order is fixed by the caller
/// (replica index), so results do not depend on input permutation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// One scalar observable sampled on a shared time grid, one row per replica.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    pub times: Vec<f64>,
    /// `per_replica[r][j]` is replica `r` at grid index `j`.
    pub per_replica: Vec<Vec<f64>>,
}

impl GridSamples {
    /// Values of all replicas at one grid index.
    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.per_replica.iter().map(move |row| row[j])
    }

    pub fn replicas(&self) -> usize {
        self.per_replica.len()
    }
}

/// A cross-replica mean with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Empirical moments per (order, grid time).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub times: Vec<f64>,
    pub orders: Vec<u32>,
    est: BTreeMap<(u32, usize), MomentEstimate>,
}

impl MomentReport {
    pub fn moment(&self, order: u32, time_idx: usize) -> &MomentEstimate {
        &self.est[&(order, time_idx)]
    }

    pub fn get(&self, order: u32, time_idx: usize) -> Option<&MomentEstimate> {
        self.est.get(&(order, time_idx))
    }
}

fn mean_and_se(values: impl Iterator<Item = f64>, n: usize) -> MomentEstimate {
    let mut sum = NeumaierSum::default();
    let mut collected = Vec::with_capacity(n);
    for v in values {
        sum.add(v);
        collected.push(v);
    }
    let mean = sum.total() / n as f64;
    let std_error = if n >= 2 {
        let mut sq = NeumaierSum::default();
        for v in &collected {
            let d = v - mean;
            sq.add(d * d);
        }
        (sq.total() / (n as f64 - 1.0)).max(0.0).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };
    MomentEstimate { estimate: mean, std_error }
}

/// Cross-replica estimates of `E(V_t^r)` for each requested order and each
/// grid time. Replicas reduce in index order with compensated summation, so
/// the result is invariant under permutations of the input rows.
pub fn estimate_moments(samples: &GridSamples, orders: &[u32]) -> Result<MomentReport> {
    if samples.per_replica.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if orders.is_empty() {
        return Err(Error::Config("orders must be nonempty".into()));
    }
    let n = samples.replicas();
    let mut est = BTreeMap::new();
    for &order in orders {
        for j in 0..samples.times.len() {
            let it = samples.column(j).map(|v| v.powi(order as i32));
            est.insert((order, j), mean_and_se(it, n));
        }
    }
    Ok(MomentReport {
        times: samples.times.clone(),
        orders: orders.to_vec(),
        est,
    })
}

/// Batch-means estimate for an ergodic average along a single path: split
/// into `batches` equal batches (dropping a remainder at the front) and use
/// the batch means' spread for the standard error.
pub fn batch_means(values: &[f64], batches: usize) -> Result<MomentEstimate> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if batches < 2 || values.len() < 2 * batches {
        return Err(Error::Config(format!(
            "batch means needs at least 2 values per batch across >= 2 batches; \
             got {} values, {batches} batches",
            values.len()
        )));
    }
    let batch_len = values.len() / batches;
    let start = values.len() - batch_len * batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| {
            let lo = start + b * batch_len;
            let mut s = NeumaierSum::default();
            for &v in &values[lo..lo + batch_len] {
                s.add(v);
            }
            s.total() / batch_len as f64
        })
        .collect();
    Ok(mean_and_se(means.iter().copied(), batches))
}
