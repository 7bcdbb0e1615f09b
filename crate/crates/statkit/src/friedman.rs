//! Friedman omnibus test over within-row ranks, Conover's pairwise
//! post-hoc, and the Bonferroni adjustment.
//!
//! The Friedman statistic is the tie-corrected form: with ranks r_ij
//! (ties share the mean rank), column rank sums R_j, A = ΣΣ r²,
//! B = Σ R_j²/n and C = nk(k+1)²/4,
//! T = n(k−1)(B − C) / (A − C) with df = k − 1.
//!
//! For layouts small enough to enumerate — (k!)^n within a fixed budget —
//! the p-value is the exact permutation tail of T under within-row
//! exchangeability; larger layouts use the chi-square approximation.
//! Doubling the mean ranks turns the enumeration into pure integer
//! comparisons, so the exact tail has no floating-point ambiguity.

use serde::{Deserialize, Serialize};

use crate::dist::{chi2_sf, t_sf};
use crate::{StatError, TestResult};

/// Largest number of rank assignments (k!)^n we enumerate exactly.
const EXACT_ENUM_LIMIT: u64 = 50_000;

/// Rank one row, ties sharing the mean rank, returned doubled so that all
/// ranks are integers (mean of two adjacent ranks is a half-integer).
fn doubled_ranks(row: &[f64]) -> Vec<i64> {
    let k = row.len();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).expect("non-finite value"));
    let mut out = vec![0i64; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j + 1 < k && row[idx[j + 1]] == row[idx[i]] {
            j += 1;
        }
        // positions i..=j tie; doubled mean rank = (i+1) + (j+1)
        let doubled = (i as i64 + 1) + (j as i64 + 1);
        for &p in &idx[i..=j] {
            out[p] = doubled;
        }
        i = j + 1;
    }
    out
}

fn validate(rows: &[Vec<f64>]) -> Result<(usize, usize), StatError> {
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
    for (i, r) in rows.iter().enumerate() {
        if r.len() != k {
            return Err(StatError::BadMatrix(format!(
                "row {i} has {} columns, expected {k}",
                r.len()
            )));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(StatError::BadMatrix(format!("row {i} has a non-finite value")));
        }
    }
    Ok((n, k))
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Σ_j (Σ_i 2·r_ij)² for a set of doubled-rank rows; the permutation tail
/// of T is monotone in this integer, which keeps the enumeration exact.
fn doubled_rank_sum_sq(rank_rows: &[Vec<i64>], k: usize) -> i64 {
    let mut sums = vec![0i64; k];
    for row in rank_rows {
        for (j, r) in row.iter().enumerate() {
            sums[j] += r;
        }
    }
    sums.iter().map(|s| s * s).sum()
}

/// All k! orderings of 0..k.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::with_capacity(factorial(k) as usize);
    rec(&mut Vec::new(), &mut (0..k).collect(), &mut out);
    out
}

/// Exact permutation tail P(S ≥ s_obs) where S = Σ_j (column sum of
/// doubled ranks)², enumerating every within-row rank assignment.
fn exact_tail(rank_rows: &[Vec<i64>], k: usize, s_obs: i64) -> f64 {
    let perms = permutations(k);
    let n = rank_rows.len();
    // per-row permuted doubled-rank variants
    let variants: Vec<Vec<Vec<i64>>> = rank_rows
        .iter()
        .map(|row| {
            perms
                .iter()
                .map(|p| p.iter().map(|&j| row[j]).collect())
                .collect()
        })
        .collect();
    let mut count: u64 = 0;
    let mut total: u64 = 0;
    let mut sums = vec![0i64; k];
    fn rec(
        variants: &[Vec<Vec<i64>>],
        depth: usize,
        n: usize,
        sums: &mut Vec<i64>,
        s_obs: i64,
        count: &mut u64,
        total: &mut u64,
    ) {
        if depth == n {
            let s: i64 = sums.iter().map(|v| v * v).sum();
            *total += 1;
            if s >= s_obs {
                *count += 1;
            }
            return;
        }
        for variant in &variants[depth] {
            for (j, r) in variant.iter().enumerate() {
                sums[j] += r;
            }
            rec(variants, depth + 1, n, sums, s_obs, count, total);
            for (j, r) in variant.iter().enumerate() {
                sums[j] -= r;
            }
        }
    }
    rec(&variants, 0, n, &mut sums, s_obs, &mut count, &mut total);
    count as f64 / total as f64
}

/// Friedman test on a complete n×k table (rows = items, columns = raters).
pub fn friedman(rows: &[Vec<f64>]) -> Result<TestResult, StatError> {
    let (n, k) = validate(rows)?;
    let rank_rows: Vec<Vec<i64>> = rows.iter().map(|r| doubled_ranks(r)).collect();

    // Integer building blocks (doubled ranks): 4A = Σ(2r)², 4C = nk(k+1)².
    let a4: i64 = rank_rows.iter().flatten().map(|r| r * r).sum();
    let c4: i64 = (n * k * (k + 1) * (k + 1)) as i64;
    let s_obs = doubled_rank_sum_sq(&rank_rows, k);
    let nf = n as f64;
    let kf = k as f64;

    // Tie-correction factor relative to the no-tie rank variance.
    let denom_no_ties = nf * kf * (kf * kf - 1.0) / 12.0;
    let tie_correction = ((a4 - c4) as f64 / 4.0) / denom_no_ties;

    if a4 == c4 {
        // every row fully tied: no information, no rater effect
        return Ok(TestResult::new("Friedman (tie-corrected)", 0.0, vec![kf - 1.0], 1.0)
            .with_detail("tie_correction", tie_correction)
            .with_detail("exact", 0.0));
    }

    // T = n(k−1)(B − C)/(A − C); with doubled ranks B − C = (S/n − c4)/4
    // and A − C = (a4 − c4)/4, so T = (k−1)(S − n·c4)/(a4 − c4).
    let statistic = (kf - 1.0) * (s_obs as f64 - nf * c4 as f64) / (a4 - c4) as f64;

    let assignments = (factorial(k) as f64).powi(n as i32);
    let exact = assignments <= EXACT_ENUM_LIMIT as f64;
    let p = if exact {
        exact_tail(&rank_rows, k, s_obs)
    } else {
        chi2_sf(statistic, kf - 1.0)?
    };
    Ok(TestResult::new("Friedman (tie-corrected)", statistic, vec![kf - 1.0], p)
        .with_detail("tie_correction", tie_correction)
        .with_detail("exact", if exact { 1.0 } else { 0.0 }))
}

/// Symmetric matrix of Bonferroni-adjusted two-sided p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosthocMatrix {
    /// k×k adjusted p-values; diagonal exactly 1.0
    pub p: Vec<Vec<f64>>,
    /// unadjusted pairwise t statistics (antisymmetric)
    pub t: Vec<Vec<f64>>,
    /// t-distribution degrees of freedom (n−1)(k−1)
    pub df: f64,
    /// number of comparisons used in the adjustment, k(k−1)/2
    pub comparisons: usize,
}

/// Conover's all-pairs rank-sum test after Friedman, Bonferroni adjusted.
///
/// Pairwise statistic: t = (R_i − R_j) / √(2n(A − B)/((n−1)(k−1))) with
/// A = ΣΣ r² and B = Σ R_j²/n, referred to t with (n−1)(k−1) df; the
/// two-sided p is multiplied by k(k−1)/2 and capped at 1.
pub fn conover_posthoc(rows: &[Vec<f64>]) -> Result<PosthocMatrix, StatError> {
    let (n, k) = validate(rows)?;
    let rank_rows: Vec<Vec<i64>> = rows.iter().map(|r| doubled_ranks(r)).collect();
    let nf = n as f64;
    let kf = k as f64;

    let mut col_sums = vec![0.0f64; k];
    for row in &rank_rows {
        for (j, r) in row.iter().enumerate() {
            col_sums[j] += *r as f64 / 2.0;
        }
    }
    let a1: f64 = rank_rows
        .iter()
        .flatten()
        .map(|r| (*r as f64 / 2.0) * (*r as f64 / 2.0))
        .sum();
    let b1: f64 = col_sums.iter().map(|s| s * s).sum::<f64>() / nf;

    let df = (nf - 1.0) * (kf - 1.0);
    let m = k * (k - 1) / 2;
    let err = a1 - b1; // rank-ANOVA error sum of squares
    let denom = (2.0 * nf * err / df).sqrt();

    let mut p = vec![vec![1.0f64; k]; k];
    let mut t = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = col_sums[i] - col_sums[j];
            let (t_ij, p_raw) = if err <= 1e-12 * a1.max(1.0) {
                // zero residual rank variance: either no difference at all
                // or perfect separation
                if diff == 0.0 {
                    (0.0, 1.0)
                } else {
                    (f64::INFINITY * diff.signum(), 0.0)
                }
            } else {
                let t_ij = diff / denom;
                (t_ij, 2.0 * t_sf(t_ij.abs(), df)?)
            };
            let adj = (p_raw * m as f64).min(1.0);
            p[i][j] = adj;
            p[j][i] = adj;
            t[i][j] = t_ij;
            t[j][i] = -t_ij;
        }
    }
    Ok(PosthocMatrix {
        p,
        t,
        df,
        comparisons: m,
    })
}

/// Bonferroni adjustment: each p multiplied by m, capped at 1.
pub fn bonferroni(p: &[f64], m: usize) -> Result<Vec<f64>, StatError> {
    if m < 1 {
        return Err(StatError::Domain("bonferroni requires m >= 1".into()));
    }
    p.iter()
        .map(|&v| {
            if !(0.0..=1.0).contains(&v) {
                Err(StatError::Domain(format!("p-value out of range: {v}")))
            } else {
                Ok((v * m as f64).min(1.0))
            }
        })
        .collect()
}
