//! Intraclass correlation coefficients, Shrout-Fleiss family.
//!
//! Rows are targets, columns are raters. All six forms are computed from
//! the same two-way ANOVA decomposition; confidence intervals use the
//! F-distribution constructions from the Shrout-Fleiss paper (the (2,1)
//! interval goes through the Satterthwaite degrees of freedom).

use serde::{Deserialize, Serialize};

use crate::dist::f_quantile;
use crate::StatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IccVariant {
    Icc1_1,
    Icc2_1,
    Icc3_1,
    Icc1K,
    Icc2K,
    Icc3K,
}

impl IccVariant {
    pub const ALL: [IccVariant; 6] = [
        IccVariant::Icc1_1,
        IccVariant::Icc2_1,
        IccVariant::Icc3_1,
        IccVariant::Icc1K,
        IccVariant::Icc2K,
        IccVariant::Icc3K,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            IccVariant::Icc1_1 => "ICC(1,1)",
            IccVariant::Icc2_1 => "ICC(2,1)",
            IccVariant::Icc3_1 => "ICC(3,1)",
            IccVariant::Icc1K => "ICC(1,k)",
            IccVariant::Icc2K => "ICC(2,k)",
            IccVariant::Icc3K => "ICC(3,k)",
        }
    }
}

impl std::str::FromStr for IccVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['(', ')', ',', ' '], "_").as_str() {
            "icc_1_1_" | "icc_1_1" | "icc1_1" | "1_1" => Ok(IccVariant::Icc1_1),
            "icc_2_1_" | "icc_2_1" | "icc2_1" | "2_1" => Ok(IccVariant::Icc2_1),
            "icc_3_1_" | "icc_3_1" | "icc3_1" | "3_1" => Ok(IccVariant::Icc3_1),
            "icc_1_k_" | "icc_1_k" | "icc1_k" | "1_k" => Ok(IccVariant::Icc1K),
            "icc_2_k_" | "icc_2_k" | "icc2_k" | "2_k" => Ok(IccVariant::Icc2K),
            "icc_3_k_" | "icc_3_k" | "icc3_k" | "3_k" => Ok(IccVariant::Icc3K),
            other => Err(format!("unknown ICC variant: {other}")),
        }
    }
}

/// Two-way ANOVA mean squares exposed alongside every estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSquares {
    pub rows: f64,
    pub columns: f64,
    pub error: f64,
    /// one-way within-target mean square, used by the (1,·) forms
    pub within: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    pub variant: IccVariant,
    pub value: f64,
    /// (low, high) at `ci_level`
    pub ci: (f64, f64),
    pub ci_level: f64,
    pub anova: MeanSquares,
    /// set when the matrix has no usable between-row or between-column
    /// variance; the value is then a defined 0
    pub degenerate: bool,
}

struct Anova {
    n: f64,
    k: f64,
    ms: MeanSquares,
    ss_rows: f64,
    ss_cols: f64,
    ss_total: f64,
}

fn anova(rows: &[Vec<f64>]) -> Result<Anova, StatError> {
    let n = rows.len();
    if n < 2 {
        return Err(StatError::BadMatrix(format!("need at least 2 rows, got {n}")));
    }
    let k = rows[0].len();
    if k < 2 {
        return Err(StatError::BadMatrix(format!(
            "need at least 2 columns, got {k}"
        )));
    }
    if rows.iter().any(|r| r.len() != k) {
        return Err(StatError::BadMatrix("ragged matrix".into()));
    }
    let nf = n as f64;
    let kf = k as f64;
    let grand: f64 = rows.iter().flatten().sum::<f64>() / (nf * kf);
    let row_means: Vec<f64> = rows.iter().map(|r| r.iter().sum::<f64>() / kf).collect();
    let mut col_means = vec![0.0; k];
    for r in rows {
        for (j, v) in r.iter().enumerate() {
            col_means[j] += v;
        }
    }
    for c in col_means.iter_mut() {
        *c /= nf;
    }
    let ss_total: f64 = rows
        .iter()
        .flatten()
        .map(|v| (v - grand) * (v - grand))
        .sum();
    let ss_rows: f64 = kf * row_means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>();
    let ss_cols: f64 = nf * col_means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>();
    let ss_err = (ss_total - ss_rows - ss_cols).max(0.0);
    let ms = MeanSquares {
        rows: ss_rows / (nf - 1.0),
        columns: ss_cols / (kf - 1.0),
        error: ss_err / ((nf - 1.0) * (kf - 1.0)),
        within: (ss_cols + ss_err) / (nf * (kf - 1.0)),
    };
    Ok(Anova {
        n: nf,
        k: kf,
        ms,
        ss_rows,
        ss_cols,
        ss_total,
    })
}

fn point_estimate(v: IccVariant, a: &Anova) -> f64 {
    let MeanSquares {
        rows: bms,
        columns: jms,
        error: ems,
        within: wms,
    } = a.ms;
    let (n, k) = (a.n, a.k);
    match v {
        IccVariant::Icc1_1 => (bms - wms) / (bms + (k - 1.0) * wms),
        IccVariant::Icc2_1 => (bms - ems) / (bms + (k - 1.0) * ems + k * (jms - ems) / n),
        IccVariant::Icc3_1 => (bms - ems) / (bms + (k - 1.0) * ems),
        IccVariant::Icc1K => (bms - wms) / bms,
        IccVariant::Icc2K => (bms - ems) / (bms + (jms - ems) / n),
        IccVariant::Icc3K => (bms - ems) / bms,
    }
}

fn spearman_brown(r: f64, k: f64) -> f64 {
    r * k / (1.0 + (k - 1.0) * r)
}

fn confidence_interval(
    v: IccVariant,
    a: &Anova,
    value: f64,
    level: f64,
) -> Result<(f64, f64), StatError> {
    let MeanSquares {
        rows: bms,
        columns: jms,
        error: ems,
        within: wms,
    } = a.ms;
    let (n, k) = (a.n, a.k);
    let alpha = 1.0 - level;
    let q = 1.0 - alpha / 2.0;

    let interval = match v {
        IccVariant::Icc1_1 | IccVariant::Icc1K => {
            let d1 = n - 1.0;
            let d2 = n * (k - 1.0);
            let f_obs = bms / wms;
            let fl = f_obs / f_quantile(q, d1, d2)?;
            let fu = f_obs * f_quantile(q, d2, d1)?;
            if matches!(v, IccVariant::Icc1_1) {
                ((fl - 1.0) / (fl + k - 1.0), (fu - 1.0) / (fu + k - 1.0))
            } else {
                (1.0 - 1.0 / fl, 1.0 - 1.0 / fu)
            }
        }
        IccVariant::Icc3_1 | IccVariant::Icc3K => {
            let d1 = n - 1.0;
            let d2 = (n - 1.0) * (k - 1.0);
            let f_obs = bms / ems;
            let fl = f_obs / f_quantile(q, d1, d2)?;
            let fu = f_obs * f_quantile(q, d2, d1)?;
            if matches!(v, IccVariant::Icc3_1) {
                ((fl - 1.0) / (fl + k - 1.0), (fu - 1.0) / (fu + k - 1.0))
            } else {
                (1.0 - 1.0 / fl, 1.0 - 1.0 / fu)
            }
        }
        IccVariant::Icc2_1 | IccVariant::Icc2K => {
            let single = match v {
                IccVariant::Icc2_1 => value,
                _ => point_estimate(IccVariant::Icc2_1, a),
            };
            // Satterthwaite degrees of freedom for the mixed denominator
            let fj = k * single / (n * (1.0 - single));
            let fb = 1.0 + k * single * (n - 1.0) / (n * (1.0 - single));
            let num = (fj * jms + fb * ems) * (fj * jms + fb * ems);
            let den = (fj * jms) * (fj * jms) / (k - 1.0)
                + (fb * ems) * (fb * ems) / ((n - 1.0) * (k - 1.0));
            let vdf = num / den;
            let f_lo = f_quantile(q, n - 1.0, vdf)?;
            let f_hi = f_quantile(q, vdf, n - 1.0)?;
            let lo = n * (bms - f_lo * ems)
                / (f_lo * (k * jms + (k * n - k - n) * ems) + n * bms);
            let hi = n * (f_hi * bms - ems)
                / (k * jms + (k * n - k - n) * ems + n * f_hi * bms);
            if matches!(v, IccVariant::Icc2_1) {
                (lo, hi)
            } else {
                (spearman_brown(lo, k), spearman_brown(hi, k))
            }
        }
    };
    Ok(interval)
}

/// ICC for the requested Shrout-Fleiss variant with a confidence interval.
pub fn icc(rows: &[Vec<f64>], variant: IccVariant, ci_level: f64) -> Result<IccResult, StatError> {
    if ci_level.is_nan() || ci_level <= 0.0 || ci_level >= 1.0 {
        return Err(StatError::Domain(format!(
            "ci_level must be in (0,1), got {ci_level}"
        )));
    }
    let a = anova(rows)?;

    // No usable variance anywhere: defined zero with a flag.
    let noise_floor = 1e-12 * a.ss_total.max(1e-300);
    if a.ss_total == 0.0 || (a.ss_rows <= noise_floor && a.ss_cols <= noise_floor) {
        return Ok(IccResult {
            variant,
            value: 0.0,
            ci: (0.0, 0.0),
            ci_level,
            anova: a.ms,
            degenerate: true,
        });
    }

    // Identical columns (within floating-point noise): perfect agreement.
    if a.ss_total - a.ss_rows <= noise_floor {
        return Ok(IccResult {
            variant,
            value: 1.0,
            ci: (1.0, 1.0),
            ci_level,
            anova: a.ms,
            degenerate: false,
        });
    }

    let raw = point_estimate(variant, &a);

    // Negative variance-component estimates can push the average-rater
    // forms above 1 or make them non-finite (noise swamping both target
    // and rater variance). That regime carries no reliability signal:
    // report a defined 0 with the degeneracy flag.
    if !raw.is_finite() || raw > 1.0 {
        let (lo, hi) = confidence_interval(variant, &a, 0.0, ci_level).unwrap_or((0.0, 0.0));
        let lo = if lo.is_finite() { lo.min(0.0) } else { 0.0 };
        let hi = if hi.is_finite() { hi.clamp(0.0, 1.0) } else { 0.0 };
        return Ok(IccResult {
            variant,
            value: 0.0,
            ci: (lo, hi),
            ci_level,
            anova: a.ms,
            degenerate: true,
        });
    }

    let value = raw;
    let (mut lo, mut hi) = confidence_interval(variant, &a, value, ci_level)
        .unwrap_or((value, value));
    if !lo.is_finite() || !hi.is_finite() {
        lo = value;
        hi = value;
    }
    // The F constructions bracket the estimate mathematically; keep that
    // guarantee through floating-point corner cases. Only the upper end
    // has a hard bound (1); the k-rater forms are unbounded below.
    lo = lo.min(value);
    hi = hi.max(value).min(1.0);
    Ok(IccResult {
        variant,
        value,
        ci: (lo, hi),
        ci_level,
        anova: a.ms,
        degenerate: false,
    })
}
