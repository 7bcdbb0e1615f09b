use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a single hypothesis test.
///
/// `df` carries one entry for chi-square/t style tests and two for F style
/// tests. `details` holds auxiliary numbers such as tie-correction factors,
/// keyed by stable names so reports stay diffable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Vec<f64>,
    pub p_value: f64,
    pub method: String,
    pub details: BTreeMap<String, f64>,
}

impl TestResult {
    pub fn new(method: &str, statistic: f64, df: Vec<f64>, p_value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p_value), "p out of range: {p_value}");
        TestResult {
            statistic,
            df,
            p_value,
            method: method.to_string(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}
