//! Regularized incomplete gamma and beta functions.
//!
//! These are the numerical substrate for every tail probability in the
//! crate. Target accuracy is 1e-12 absolute over the domains the tests
//! exercise; series/continued-fraction switching follows the conventional
//! thresholds (x < a+1 for the gamma, x < (a+1)/(a+b+2) for the beta).

use crate::StatError;

const MAX_ITER: usize = 800;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms).
#[allow(clippy::excessive_precision)]
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // Reflection: Γ(z)Γ(1−z) = π / sin(πz)
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * z).sin().abs().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn reg_inc_gamma(a: f64, x: f64) -> Result<f64, StatError> {
    Ok(gamma_pq(a, x)?.0)
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
///
/// Computed directly (continued fraction) for x ≥ a + 1, which keeps the
/// tail accurate where 1 − P would cancel.
pub fn reg_inc_gamma_upper(a: f64, x: f64) -> Result<f64, StatError> {
    Ok(gamma_pq(a, x)?.1)
}

fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64), StatError> {
    if !(a.is_finite() && x.is_finite()) || a <= 0.0 || x < 0.0 {
        return Err(StatError::Domain(format!(
            "reg_inc_gamma requires a > 0, x >= 0 (got a={a}, x={x})"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    let log_pre = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series: P(a,x) = pre · Σ x^n / (a (a+1) … (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                let p = (log_pre.exp() * sum).clamp(0.0, 1.0);
                return Ok((p, 1.0 - p));
            }
        }
        Err(StatError::NoConvergence("reg_inc_gamma series"))
    } else {
        // Modified Lentz continued fraction for Q(a,x).
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                let q = (log_pre.exp() * h).clamp(0.0, 1.0);
                return Ok((1.0 - q, q));
            }
        }
        Err(StatError::NoConvergence("reg_inc_gamma continued fraction"))
    }
}

/// Regularized incomplete beta I_x(a, b).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64, StatError> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= 0.0 || !(0.0..=1.0).contains(&x) {
        return Err(StatError::Domain(format!(
            "reg_inc_beta requires a > 0, b > 0, 0 <= x <= 1 (got a={a}, b={b}, x={x})"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let log_pre =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let pre = log_pre.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        pre * beta_cf(a, b, x)? / a
    } else {
        1.0 - pre * beta_cf(b, a, 1.0 - x)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64, StatError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(StatError::NoConvergence("reg_inc_beta continued fraction"))
}
