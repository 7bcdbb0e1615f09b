//! Small descriptive helpers: means, spreads, RMS agreement, MAD.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::StatError;

pub fn mean(x: &[f64]) -> f64 {
    debug_assert!(!x.is_empty());
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for singleton input.
pub fn sample_sd(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Median with the mean-of-central-pair convention for even counts.
pub fn median_of(x: &[f64]) -> f64 {
    debug_assert!(!x.is_empty());
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Mean absolute deviation from the sample mean.
pub fn mean_absolute_deviation(x: &[f64]) -> Result<f64, StatError> {
    if x.is_empty() {
        return Err(StatError::EmptySample);
    }
    let m = mean(x);
    Ok(x.iter().map(|v| (v - m).abs()).sum::<f64>() / x.len() as f64)
}

/// Per-group RMS differences between two aligned value columns, plus their
/// unweighted mean across groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsSummary {
    /// group id -> RMS of (a − b) over the group's items
    pub per_group: BTreeMap<String, f64>,
    /// unweighted mean of the per-group RMS values
    pub mean: f64,
}

/// √(mean (a−b)²) within each group given by `grouping[i]`, then the
/// unweighted mean across groups.
pub fn rms_difference(a: &[f64], b: &[f64], grouping: &[String]) -> Result<RmsSummary, StatError> {
    if a.len() != b.len() || a.len() != grouping.len() {
        return Err(StatError::LengthMismatch(a.len(), b.len().min(grouping.len())));
    }
    if a.is_empty() {
        return Err(StatError::EmptySample);
    }
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for i in 0..a.len() {
        let d = a[i] - b[i];
        let e = acc.entry(grouping[i].clone()).or_insert((0.0, 0));
        e.0 += d * d;
        e.1 += 1;
    }
    let per_group: BTreeMap<String, f64> = acc
        .into_iter()
        .map(|(g, (ss, n))| (g, (ss / n as f64).sqrt()))
        .collect();
    let mean = per_group.values().sum::<f64>() / per_group.len() as f64;
    Ok(RmsSummary { per_group, mean })
}
