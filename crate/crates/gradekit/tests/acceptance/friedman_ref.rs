//! Independent reference for the exact Friedman permutation tail.
//!
//! Deliberately different construction from the production path: ranks by
//! pairwise counting (no sort), the statistic through the rank-sum
//! deviation form, permutations from Heap's algorithm, and an odometer
//! over rows recomputing every assignment from scratch.

/// Mean ranks by counting smaller/equal elements.
pub fn mean_ranks(row: &[f64]) -> Vec<f64> {
    row.iter()
        .map(|&x| {
            let less = row.iter().filter(|&&y| y < x).count() as f64;
            let equal = row.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

/// Tie-corrected statistic via (k−1)·Σ(R_j − n(k+1)/2)² / (A − C).
pub fn statistic(rank_rows: &[Vec<f64>]) -> f64 {
    let n = rank_rows.len() as f64;
    let k = rank_rows[0].len() as f64;
    let mut col = vec![0.0; rank_rows[0].len()];
    let mut a1 = 0.0;
    for row in rank_rows {
        for (j, &r) in row.iter().enumerate() {
            col[j] += r;
            a1 += r * r;
        }
    }
    let c1 = n * k * (k + 1.0) * (k + 1.0) / 4.0;
    if (a1 - c1).abs() < 1e-9 {
        return 0.0; // every row fully tied
    }
    let center = n * (k + 1.0) / 2.0;
    let dev: f64 = col.iter().map(|r| (r - center) * (r - center)).sum();
    (k - 1.0) * dev / (a1 - c1)
}

/// All k! permutations via Heap's algorithm.
fn heap_permutations(k: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    fn rec(depth: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if depth == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..depth {
            rec(depth - 1, items, out);
            if depth % 2 == 0 {
                items.swap(i, depth - 1);
            } else {
                items.swap(0, depth - 1);
            }
        }
    }
    rec(k, &mut items, &mut out);
    out
}

/// Exact permutation tail P(T ≥ T_obs) over every within-row rank
/// assignment, counted with a 1e-9 slack so rational ties are kept.
pub fn exact_p(rows: &[Vec<f64>]) -> f64 {
    let rank_rows: Vec<Vec<f64>> = rows.iter().map(|r| mean_ranks(r)).collect();
    let t_obs = statistic(&rank_rows);
    let k = rows[0].len();
    let n = rows.len();
    let perms = heap_permutations(k);
    let total = (perms.len() as u64).pow(n as u32);

    let mut odometer = vec![0usize; n];
    let mut count = 0u64;
    for _ in 0..total {
        let assigned: Vec<Vec<f64>> = rank_rows
            .iter()
            .zip(&odometer)
            .map(|(row, &p)| perms[p].iter().map(|&j| row[j]).collect())
            .collect();
        if statistic(&assigned) >= t_obs - 1e-9 {
            count += 1;
        }
        for digit in odometer.iter_mut() {
            *digit += 1;
            if *digit < perms.len() {
                break;
            }
            *digit = 0;
        }
    }
    count as f64 / total as f64
}
