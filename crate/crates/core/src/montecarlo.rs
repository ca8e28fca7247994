//! Monte Carlo sampling of meeting times on regular graphs and comparison
//! with the exponential limit law.
//!
//! Two independent rate-1 walks are simulated by competing exponential
//! clocks: the pair jumps after an `Exp(2)` holding time, a fair coin picks
//! which walker moves, and that walker steps to a uniform neighbor. The first
//! time the two positions coincide is the meeting time, sampled without any
//! time discretization.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_regular, RegularGraph};
use crate::mckay::limit_mean;
use crate::rng::{derive_seed, stream_rng};

/// Description of how per-sample RNG streams are derived.
pub const SEED_RULE: &str = "sample i uses ChaCha8 seeded from the master seed with stream i";

const GRAPH_SEED_DOMAIN: u64 = 0x6772_6170_68;
const SAMPLE_SEED_DOMAIN: u64 = 0x7361_6d70_6c65;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub graph_id: String,
    pub k: usize,
    pub n: usize,
    pub master_seed: u64,
    pub seed_rule: String,
    /// Meeting times in units of the rate-1 walk.
    pub samples: Vec<f64>,
}

/// Point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Sample mean and standard error of the mean.
    pub fn from_values(values: impl ExactSizeIterator<Item = f64> + Clone) -> Self {
        let count = values.len() as f64;
        let mean = values.clone().sum::<f64>() / count;
        if count < 2.0 {
            return Self {
                value: mean,
                se: 0.0,
            };
        }
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0);
        Self {
            value: mean,
            se: (var / count).sqrt(),
        }
    }

    /// Whether `target` lies within `z` standard errors.
    pub fn covers(&self, target: f64, z: f64) -> bool {
        (self.value - target).abs() <= z * self.se
    }
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// Samples divided by `n`.
    pub fn scaled(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.samples.iter().map(|m| m / n).collect()
    }

    /// Estimate of `E[M]`.
    pub fn mean(&self) -> Estimate {
        Estimate::from_values(self.samples.iter().copied())
    }

    /// Estimate of `E[e^{-λM}]`.
    pub fn laplace(&self, lambda: f64) -> Estimate {
        Estimate::from_values(self.samples.iter().map(|m| (-lambda * m).exp()))
    }
}

fn sample_one(graph: &RegularGraph, master_seed: u64, index: u64) -> f64 {
    let mut rng = stream_rng(master_seed, index);
    let n = graph.n();
    let mut x = rng.random_range(0..n);
    let mut y = rng.random_range(0..n);
    let clock = Exp::new(2.0).expect("positive rate");
    let mut t = 0.0;
    while x != y {
        t += clock.sample(&mut rng);
        let walker = if rng.random::<bool>() { &mut x } else { &mut y };
        let nbrs = graph.neighbors(*walker);
        *walker = nbrs[rng.random_range(0..nbrs.len())];
    }
    t
}

/// Draw `count` meeting times from independent uniform starts.
pub fn sample_meeting(graph: &RegularGraph, count: usize, master_seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if !graph.is_connected() {
        return Err(Error::Irreducible(format!(
            "graph {} is disconnected, so meeting times can be infinite",
            graph.id()
        )));
    }
    let samples = (0..count as u64)
        .into_par_iter()
        .map(|i| sample_one(graph, master_seed, i))
        .collect();
    Ok(SampleBatch {
        graph_id: graph.id().to_string(),
        k: graph.k(),
        n: graph.n(),
        master_seed,
        seed_rule: SEED_RULE.to_string(),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitComparison {
    pub limit_mean: f64,
    pub count: usize,
    /// Estimate of `E[M/n]`.
    pub mean_est: f64,
    pub mean_se: f64,
    /// `E[(M/n)^ℓ] / (ℓ! · limit_mean^ℓ)` for `ℓ = 1..=4`.
    pub moment_ratios: Vec<f64>,
    /// Sup distance between the empirical CDF of `(M/n)/limit_mean` and
    /// `1 - e^{-t}`.
    pub ks_distance: f64,
    /// `∫ |empirical CDF - (1 - e^{-t})| dt` on the same normalization.
    pub w1_distance: f64,
}

/// Compare a batch with the exponential law of mean `limit_mean(k)`.
pub fn compare_to_limit(batch: &SampleBatch) -> Result<LimitComparison> {
    if batch.samples.is_empty() {
        return Err(Error::invalid("batch is empty"));
    }
    let limit = limit_mean(batch.k)?;
    Ok(compare_to_exponential(&batch.scaled(), limit))
}

/// Compare a nonempty sample with the exponential law of mean `mean`.
pub fn compare_to_exponential(sample: &[f64], mean: f64) -> LimitComparison {
    assert!(!sample.is_empty(), "sample must be nonempty");
    let estimate = Estimate::from_values(sample.iter().copied());
    let count = sample.len() as f64;
    let mut factorial = 1.0;
    let moment_ratios = (1..=4)
        .map(|ell| {
            factorial *= ell as f64;
            let raw = sample.iter().map(|x| x.powi(ell)).sum::<f64>() / count;
            raw / (factorial * mean.powi(ell))
        })
        .collect();
    let mut normalized: Vec<f64> = sample.iter().map(|x| x / mean).collect();
    normalized.sort_by(f64::total_cmp);
    LimitComparison {
        limit_mean: mean,
        count: sample.len(),
        mean_est: estimate.value,
        mean_se: estimate.se,
        moment_ratios,
        ks_distance: ks_exponential(&normalized),
        w1_distance: w1_exponential(&normalized),
    }
}

fn exp_cdf(t: f64) -> f64 {
    -(-t).exp_m1()
}

/// Kolmogorov–Smirnov distance of a sorted sample to the unit exponential.
pub fn ks_exponential(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = exp_cdf(t);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// `∫_a^b (1 - e^{-t}) dt`.
fn cdf_integral(a: f64, b: f64) -> f64 {
    (b - a) - ((-a).exp() - (-b).exp())
}

/// `∫_a^b |c - F(t)| dt` for the unit exponential CDF `F`.
fn abs_gap_integral(c: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    // F crosses the level c at t = -ln(1 - c)
    let cross = if c >= 1.0 {
        f64::INFINITY
    } else {
        -(-c).ln_1p()
    };
    let m = cross.clamp(a, b);
    let below = c * (m - a) - cdf_integral(a, m);
    let above = cdf_integral(m, b) - c * (b - m);
    below + above
}

/// Exact Wasserstein-1 distance of a sorted sample to the unit exponential,
/// integrating the CDF gap piecewise between order statistics.
pub fn w1_exponential(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let mut total = cdf_integral(0.0, sorted[0].max(0.0));
    for i in 0..sorted.len() - 1 {
        total += abs_gap_integral((i + 1) as f64 / n, sorted[i], sorted[i + 1]);
    }
    total + (-sorted[sorted.len() - 1]).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub graph_seeds: Vec<u64>,
    /// Average of the per-graph estimates of `E[M/n]`.
    pub mean_est: f64,
    pub pooled_se: f64,
    /// `|mean_est - limit_mean|`.
    pub deviation: f64,
    /// Average per-graph KS distance.
    pub ks_distance: f64,
    /// Typical KS fluctuation under the limit law, `0.87/√count`.
    pub ks_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub k: usize,
    pub limit_mean: f64,
    pub samples_per_graph: usize,
    pub rows: Vec<SweepRow>,
    /// Deviations non-increasing within one combined SE; absent for a single size.
    pub deviation_non_increasing: Option<bool>,
    /// KS distances non-increasing within noise; absent for a single size.
    pub ks_non_increasing: Option<bool>,
}

/// Mean meeting time over fresh graphs of increasing size.
pub fn convergence_sweep(
    k: usize,
    sizes: &[usize],
    seeds_per_size: usize,
    samples_per_graph: usize,
    master_seed: u64,
) -> Result<SweepReport> {
    let limit = limit_mean(k)?;
    if sizes.is_empty() || seeds_per_size == 0 || samples_per_graph == 0 {
        return Err(Error::invalid(
            "sweep needs at least one size, seed and sample",
        ));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sweep sizes must be strictly ascending"));
    }
    if let Some(n) = sizes.iter().find(|&&n| (n * k) % 2 == 1 || n <= k) {
        return Err(Error::invalid(format!(
            "no {k}-regular graph on {n} vertices"
        )));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut means = Vec::with_capacity(seeds_per_size);
        let mut ses = Vec::with_capacity(seeds_per_size);
        let mut ks = Vec::with_capacity(seeds_per_size);
        let mut graph_seeds = Vec::with_capacity(seeds_per_size);
        for j in 0..seeds_per_size as u64 {
            let graph_seed = derive_seed(master_seed, GRAPH_SEED_DOMAIN ^ n as u64, j);
            let graph = sample_regular(n, k, graph_seed)?;
            if !graph.is_connected() {
                log::warn!("skipping disconnected graph {}", graph.id());
                continue;
            }
            let sample_seed = derive_seed(master_seed, SAMPLE_SEED_DOMAIN ^ n as u64, j);
            let batch = sample_meeting(&graph, samples_per_graph, sample_seed)?;
            let cmp = compare_to_limit(&batch)?;
            means.push(cmp.mean_est);
            ses.push(cmp.mean_se);
            ks.push(cmp.ks_distance);
            graph_seeds.push(graph_seed);
        }
        if means.is_empty() {
            return Err(Error::SamplingFailure {
                attempts: seeds_per_size,
            });
        }
        let m = means.len() as f64;
        let mean_est = means.iter().sum::<f64>() / m;
        rows.push(SweepRow {
            n,
            graph_seeds,
            mean_est,
            pooled_se: ses.iter().map(|s| s * s).sum::<f64>().sqrt() / m,
            deviation: (mean_est - limit).abs(),
            ks_distance: ks.iter().sum::<f64>() / m,
            ks_noise: 0.87 / (samples_per_graph as f64).sqrt(),
        });
    }
    let trend = |value: &dyn Fn(&SweepRow) -> f64, noise: &dyn Fn(&SweepRow, &SweepRow) -> f64| {
        (rows.len() > 1).then(|| {
            rows.windows(2)
                .all(|w| value(&w[1]) <= value(&w[0]) + noise(&w[0], &w[1]))
        })
    };
    let deviation_non_increasing = trend(&|r| r.deviation, &|a, b| a.pooled_se.hypot(b.pooled_se));
    let ks_non_increasing = trend(&|r| r.ks_distance, &|a, b| a.ks_noise.hypot(b.ks_noise));
    Ok(SweepReport {
        k,
        limit_mean: limit,
        samples_per_graph,
        rows,
        deviation_non_increasing,
        ks_non_increasing,
    })
}
