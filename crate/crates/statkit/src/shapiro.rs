//! Shapiro-Wilk W test for normality, Royston's AS R94 approximation.
//!
//! Valid for 3 <= n <= 5000: normal-order-statistic coefficients from the
//! Blom-style quantiles, polynomial small-sample corrections, and the
//! log-normal transform of W for the p-value.

use crate::dist::{normal_quantile, normal_sf};
use crate::{StatError, TestResult};

const MAX_N: usize = 5000;

fn poly(coeffs: &[f64], x: f64) -> f64 {
    // coeffs[0] is the constant term
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Shapiro-Wilk normality test.
pub fn shapiro_wilk(sample: &[f64]) -> Result<TestResult, StatError> {
    let n = sample.len();
    if n < 3 {
        return Err(StatError::TooFewObservations {
            required: 3,
            actual: n,
        });
    }
    if n > MAX_N {
        return Err(StatError::SampleTooLarge(n, MAX_N));
    }
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample value"));
    if x[n - 1] - x[0] == 0.0 {
        return Err(StatError::ZeroVariance);
    }

    let a = coefficients(n)?;

    // W = (Σ a_i x_(i))² / Σ (x_i − x̄)², with a antisymmetric so only the
    // upper half is stored: a_full[n−1−i] = a[i], a_full[i] = −a[i].
    let mean = x.iter().sum::<f64>() / n as f64;
    let ssq: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let mut num = 0.0;
    for (i, &ai) in a.iter().enumerate() {
        num += ai * (x[n - 1 - i] - x[i]);
    }
    let w = ((num * num) / ssq).clamp(0.0, 1.0);
    let p = p_value(w, n);

    Ok(TestResult::new("Shapiro-Wilk (AS R94)", w, vec![n as f64], p))
}

/// Upper-half coefficient vector a[0..n/2] (a[0] pairs the extremes).
fn coefficients(n: usize) -> Result<Vec<f64>, StatError> {
    let half = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an = n as f64;
    // Expected normal order statistics via the (i − 3/8)/(n + 1/4) quantiles.
    let mut m = Vec::with_capacity(half);
    for i in 1..=half {
        m.push(normal_quantile((i as f64 - 0.375) / (an + 0.25))?);
    }
    let m_sum_sq = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let rsn = 1.0 / an.sqrt();

    const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_190, 4.434_685, -2.706_056];
    const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];

    // m[0] is the most negative order statistic; the published corrections
    // apply to the largest coefficients, i.e. index 0 (and 1 for n > 5).
    let a0 = -m[0] / m_sum_sq.sqrt() + poly(&C1, rsn);
    let (start, phi, a1) = if n > 5 {
        let a1 = -m[1] / m_sum_sq.sqrt() + poly(&C2, rsn);
        let phi = (m_sum_sq - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a0 * a0 - 2.0 * a1 * a1);
        (2, phi, Some(a1))
    } else {
        let phi = (m_sum_sq - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a0 * a0);
        (1, phi, None)
    };

    let mut a = vec![0.0; half];
    a[0] = a0;
    if let Some(a1) = a1 {
        a[1] = a1;
    }
    for i in start..half {
        a[i] = -m[i] / phi.sqrt();
    }
    Ok(a)
}

/// P(W < w) under normality, via Royston's transforms of 1 − W.
fn p_value(w: f64, n: usize) -> f64 {
    if w >= 1.0 {
        return 1.0;
    }
    let an = n as f64;
    if n == 3 {
        // exact small-sample form
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = (0.75_f64).sqrt().asin();
        return (pi6 * (w.sqrt().asin() - stqr)).clamp(0.0, 1.0);
    }
    const G: [f64; 2] = [-2.273, 0.459];
    const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
    const C4: [f64; 4] = [1.382_2, -0.778_57, 0.062_767, -0.002_032_2];
    const C5: [f64; 4] = [-1.586_1, -0.310_82, -0.083_751, 0.003_891_5];
    const C6: [f64; 3] = [-0.480_3, -0.082_676, 0.003_030_2];

    let y = (1.0 - w).ln();
    let (z, mu, sigma) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99; // W so small the transform saturates
        }
        let y = -(gamma - y).ln();
        (y, poly(&C3, an), poly(&C4, an).exp())
    } else {
        let u = an.ln();
        (y, poly(&C5, u), poly(&C6, u).exp())
    };
    normal_sf((z - mu) / sigma).clamp(0.0, 1.0)
}
