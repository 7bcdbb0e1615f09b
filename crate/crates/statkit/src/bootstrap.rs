//! Seed-deterministic bootstrap resampling.
//!
//! Iterations are partitioned into fixed-size blocks and every block draws
//! from its own pre-split PRNG stream. Blocks are evaluated in parallel but
//! reduced in block order, so the output is a pure function of
//! (data, iterations, seed) no matter how many threads run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::prng::Rng;
use crate::{StatError, TestResult};

const BLOCK: u32 = 1024;

/// Point estimate plus one-sigma bootstrap spread of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEstimate {
    /// sample mean of the input data
    pub mean: f64,
    /// standard deviation of the bootstrap means (iterations denominator)
    pub sd: f64,
    pub iterations: u32,
    pub seed: u64,
}

fn block_streams(seed: u64, iterations: u32) -> Vec<(u64, u32)> {
    let root = Rng::new(seed);
    let blocks = iterations.div_ceil(BLOCK);
    (0..blocks)
        .map(|b| {
            let count = BLOCK.min(iterations - b * BLOCK);
            (root.stream(u64::from(b)).seed(), count)
        })
        .collect()
}

/// Bootstrap means of `x`, one per iteration, in deterministic order.
fn bootstrap_means(x: &[f64], iterations: u32, seed: u64) -> Vec<f64> {
    let n = x.len();
    block_streams(seed, iterations)
        .into_par_iter()
        .map(|(block_seed, count)| {
            let mut rng = Rng::new(block_seed);
            (0..count)
                .map(|_| {
                    let mut s = 0.0;
                    for _ in 0..n {
                        s += x[rng.next_index(n)];
                    }
                    s / n as f64
                })
                .collect::<Vec<f64>>()
        })
        .flatten()
        .collect()
}

/// Mean of `x` with a bootstrap one-sigma spread of the mean.
pub fn bootstrap_mean_sd(
    x: &[f64],
    iterations: u32,
    seed: u64,
) -> Result<BootstrapEstimate, StatError> {
    if x.is_empty() {
        return Err(StatError::EmptySample);
    }
    if iterations < 1 {
        return Err(StatError::Domain("iterations must be >= 1".into()));
    }
    let means = bootstrap_means(x, iterations, seed);
    let grand = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / means.len() as f64;
    Ok(BootstrapEstimate {
        mean: x.iter().sum::<f64>() / x.len() as f64,
        sd: var.sqrt(),
        iterations,
        seed,
    })
}

/// Two-sided bootstrap p-value for a paired mean difference.
///
/// Pairs are resampled jointly; per iteration d* = mean(x*) − mean(y*) and
/// p = min(1, 2·min(frac d* ≤ 0, frac d* ≥ 0)). Exact zeros count on both
/// sides, so identical inputs give p = 1.
pub fn bootstrap_diff_pvalue(
    x: &[f64],
    y: &[f64],
    iterations: u32,
    seed: u64,
) -> Result<TestResult, StatError> {
    if x.len() != y.len() {
        return Err(StatError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatError::TooFewObservations {
            required: 2,
            actual: x.len(),
        });
    }
    if iterations < 1 {
        return Err(StatError::Domain("iterations must be >= 1".into()));
    }
    let n = x.len();
    let counts: Vec<(u64, u64)> = block_streams(seed, iterations)
        .into_par_iter()
        .map(|(block_seed, count)| {
            let mut rng = Rng::new(block_seed);
            let mut le = 0u64;
            let mut ge = 0u64;
            for _ in 0..count {
                let mut dx = 0.0;
                for _ in 0..n {
                    let i = rng.next_index(n);
                    dx += x[i] - y[i];
                }
                let d = dx / n as f64;
                if d <= 0.0 {
                    le += 1;
                }
                if d >= 0.0 {
                    ge += 1;
                }
            }
            (le, ge)
        })
        .collect();
    let (le, ge) = counts
        .into_iter()
        .fold((0u64, 0u64), |(a, b), (l, g)| (a + l, b + g));
    let total = f64::from(iterations);
    let p = (2.0 * (le.min(ge) as f64 / total)).min(1.0);
    let observed = x.iter().sum::<f64>() / n as f64 - y.iter().sum::<f64>() / n as f64;
    Ok(
        TestResult::new("bootstrap paired mean difference", observed, vec![], p)
            .with_detail("iterations", total)
            .with_detail("seed", seed as f64),
    )
}
