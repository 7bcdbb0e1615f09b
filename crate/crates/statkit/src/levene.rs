//! Levene's test for homogeneity of variances.
//!
//! One-way ANOVA on absolute deviations from a group center. Median center
//! (the default) is the Brown-Forsythe variant; mean center is the classic
//! form. The report layer records which variant ran.

use serde::{Deserialize, Serialize};

use crate::describe::median_of;
use crate::dist::f_sf;
use crate::{StatError, TestResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeveneCenter {
    Median,
    Mean,
}

impl LeveneCenter {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeveneCenter::Median => "median",
            LeveneCenter::Mean => "mean",
        }
    }
}

/// Levene / Brown-Forsythe test over two or more groups.
///
/// All-zero deviations across every group (e.g. constant groups) is a
/// defined degenerate case: F = 0, p = 1.
pub fn levene(groups: &[Vec<f64>], center: LeveneCenter) -> Result<TestResult, StatError> {
    if groups.len() < 2 {
        return Err(StatError::Domain(format!(
            "levene requires at least 2 groups, got {}",
            groups.len()
        )));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(StatError::Domain(format!(
                "levene group {i} has {} observations, need at least 2",
                g.len()
            )));
        }
    }

    let deviations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let c = match center {
                LeveneCenter::Median => median_of(g),
                LeveneCenter::Mean => g.iter().sum::<f64>() / g.len() as f64,
            };
            g.iter().map(|x| (x - c).abs()).collect()
        })
        .collect();

    let g = deviations.len() as f64;
    let n_total: usize = deviations.iter().map(|d| d.len()).sum();
    let n = n_total as f64;
    let grand: f64 = deviations.iter().flatten().sum::<f64>() / n;

    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for d in &deviations {
        let ni = d.len() as f64;
        let mi = d.iter().sum::<f64>() / ni;
        ss_between += ni * (mi - grand) * (mi - grand);
        ss_within += d.iter().map(|z| (z - mi) * (z - mi)).sum::<f64>();
    }

    let df1 = g - 1.0;
    let df2 = n - g;
    let method = match center {
        LeveneCenter::Median => "Levene (Brown-Forsythe, median center)",
        LeveneCenter::Mean => "Levene (mean center)",
    };
    if ss_within == 0.0 && ss_between == 0.0 {
        return Ok(TestResult::new(method, 0.0, vec![df1, df2], 1.0)
            .with_detail("degenerate", 1.0));
    }
    if ss_within == 0.0 {
        // deviations identical within groups but different across: infinite F
        return Ok(TestResult::new(method, f64::INFINITY, vec![df1, df2], 0.0));
    }
    let f = (ss_between / df1) / (ss_within / df2);
    let p = f_sf(f, df1, df2)?;
    Ok(TestResult::new(method, f, vec![df1, df2], p))
}
