//! Tail and central probabilities expressed through the incomplete
//! gamma/beta substrate, plus the quantiles the ICC intervals need.

use crate::special::{reg_inc_beta, reg_inc_gamma_upper};
use crate::StatError;

/// Chi-square survival function P(X >= x) with k degrees of freedom.
pub fn chi2_sf(x: f64, k: f64) -> Result<f64, StatError> {
    if k.is_nan() || k <= 0.0 {
        return Err(StatError::Domain(format!("chi2_sf requires df > 0, got {k}")));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    reg_inc_gamma_upper(k / 2.0, x / 2.0)
}

/// Two-sided-friendly Student t survival function P(T >= x).
pub fn t_sf(x: f64, df: f64) -> Result<f64, StatError> {
    if df.is_nan() || df <= 0.0 {
        return Err(StatError::Domain(format!("t_sf requires df > 0, got {df}")));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 0.0 } else { 1.0 });
    }
    let half_tail = 0.5 * reg_inc_beta(df / 2.0, 0.5, df / (df + x * x))?;
    Ok(if x > 0.0 { half_tail } else { 1.0 - half_tail })
}

/// F survival function P(F >= x) with (d1, d2) degrees of freedom.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64, StatError> {
    if d1.is_nan() || d2.is_nan() || d1 <= 0.0 || d2 <= 0.0 {
        return Err(StatError::Domain(format!(
            "f_sf requires d1 > 0 and d2 > 0, got ({d1}, {d2})"
        )));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
}

/// Standard normal CDF via the incomplete gamma route:
/// Φ(z) = erfc(−z/√2)/2 and erfc(t) = Q(1/2, t²) for t ≥ 0.
pub fn normal_cdf(z: f64) -> f64 {
    if z == 0.0 {
        return 0.5;
    }
    let half_q = 0.5 * reg_inc_gamma_upper(0.5, z * z / 2.0).expect("fixed-domain call");
    if z < 0.0 {
        half_q
    } else {
        1.0 - half_q
    }
}

/// Standard normal survival function P(Z >= z).
pub fn normal_sf(z: f64) -> f64 {
    normal_cdf(-z)
}

/// Standard normal quantile: Acklam's rational approximation polished with
/// two Newton steps against `normal_cdf`.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> Result<f64, StatError> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(StatError::Domain(format!(
            "normal_quantile requires 0 < p < 1, got {p}"
        )));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p > 1.0 - P_LOW {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let err = normal_cdf(x) - p;
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf <= 0.0 {
            break;
        }
        x -= err / pdf;
    }
    Ok(x)
}

/// F quantile: smallest x with P(F <= x) = p, by bracketing bisection on
/// `f_sf`. Used only for confidence intervals, so robustness beats speed.
pub fn f_quantile(p: f64, d1: f64, d2: f64) -> Result<f64, StatError> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(StatError::Domain(format!(
            "f_quantile requires 0 < p < 1, got {p}"
        )));
    }
    let target = 1.0 - p; // work on the survival side
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while f_sf(hi, d1, d2)? > target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(StatError::NoConvergence("f_quantile bracketing"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_sf(mid, d1, d2)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
