//! Independent reference for Conover's all-pairs post-hoc p-values.
//!
//! Ranks come from the counting-based helper and the Student-t tail is
//! evaluated through the high-precision incomplete-beta oracle rather
//! than any code shared with the implementation under test.

use super::friedman_ref::mean_ranks;
use super::oracle::oracle_reg_inc_beta;

/// Two-sided t tail via I_x(df/2, 1/2) with x = df/(df + t²), the argument
/// rationalized at 1e-15.
fn two_sided_t(t: f64, df: u32) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let x = df as f64 / (df as f64 + t * t);
    const DEN: u64 = 1_000_000_000_000_000;
    let xn = (x * DEN as f64).round() as u64;
    oracle_reg_inc_beta(df, 1, xn.min(DEN), DEN)
}

/// Bonferroni-adjusted pairwise p-values.
pub fn pairwise_p(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let k = rows[0].len();
    let rank_rows: Vec<Vec<f64>> = rows.iter().map(|r| mean_ranks(r)).collect();
    let mut col = vec![0.0; k];
    let mut a1 = 0.0;
    for row in &rank_rows {
        for (j, &r) in row.iter().enumerate() {
            col[j] += r;
            a1 += r * r;
        }
    }
    let b1 = col.iter().map(|c| c * c).sum::<f64>() / n;
    let df = (n - 1.0) * (k as f64 - 1.0);
    let se = (2.0 * n * (a1 - b1) / df).sqrt();
    let m = (k * (k - 1) / 2) as f64;

    let mut p = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let raw = if a1 - b1 <= 1e-12 * a1.max(1.0) {
                if col[i] == col[j] {
                    1.0
                } else {
                    0.0
                }
            } else {
                two_sided_t((col[i] - col[j]).abs() / se, df as u32)
            };
            let adj = (raw * m).min(1.0);
            p[i][j] = adj;
            p[j][i] = adj;
        }
    }
    p
}
