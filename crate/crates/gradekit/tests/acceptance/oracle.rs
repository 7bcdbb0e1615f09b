//! High-precision series oracles for the regularized incomplete gamma and
//! beta functions, built on the fixed-point big-integer arithmetic in
//! `bigfixed`. Parameters are half-integers (a = a2/2) and arguments are
//! exact rationals, which covers every tail probability the chi-square,
//! t and F distributions need.

use num_bigint::BigInt;
use num_traits::One;

use super::bigfixed::{exp_neg, pi, Fx, PREC};

fn big_factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Γ(a2/2) as (rational value, √π power ∈ {0,1}).
/// Γ(m) = (m−1)!; Γ(m + 1/2) = (2m)!/(4^m m!) · √π.
fn gamma_half(a2: u32) -> (Fx, u32) {
    assert!(a2 >= 1);
    if a2 % 2 == 0 {
        (Fx::from_bigint_ratio(&big_factorial(a2 / 2 - 1), &BigInt::one()), 0)
    } else {
        let m = (a2 - 1) / 2;
        let num = big_factorial(2 * m);
        let den = BigInt::from(4).pow(m) * big_factorial(m);
        (Fx::from_bigint_ratio(&num, &den), 1)
    }
}

/// x^(a2/2) for rational x ≥ 0.
fn pow_half(x: &Fx, a2: u32) -> Fx {
    let whole = x.powi(a2 / 2);
    if a2 % 2 == 1 {
        whole.mul(&x.sqrt())
    } else {
        whole
    }
}

/// Regularized lower incomplete gamma P(a2/2, xn/xd) to ~60 digits,
/// returned as f64.
///
/// P(a, x) = e^{−x} x^a / Γ(a) · Σ_{n≥0} x^n / (a(a+1)…(a+n)),
/// summed with the exact half-integer recurrence term·2x/(a2+2n+2).
pub fn oracle_reg_inc_gamma(a2: u32, xn: u64, xd: u64) -> f64 {
    assert!(a2 >= 1 && xd >= 1);
    if xn == 0 {
        return 0.0;
    }
    let x = Fx::from_ratio(xn as i64, xd as i64);

    // series Σ x^n / (a (a+1) … (a+n)), term_0 = 1/a = 2/a2
    let mut term = Fx::from_ratio(2, a2 as i64);
    let mut sum = term.clone();
    let mut converged = false;
    for n in 0..4000u32 {
        term = term.mul(&x).mul(&Fx::from_int(2)).div(&Fx::from_int((a2 + 2 * n + 2) as i64));
        sum = sum.add(&term);
        if term.below_pow10(PREC - 8) {
            converged = true;
            break;
        }
    }
    assert!(converged, "gamma oracle series did not converge");

    let (gamma_rat, pi_pow) = gamma_half(a2);
    let mut value = exp_neg(&x).mul(&pow_half(&x, a2)).mul(&sum).div(&gamma_rat);
    if pi_pow == 1 {
        value = value.div(&pi().sqrt());
    }
    value.to_f64()
}

/// Regularized incomplete beta I_x(a2/2, b2/2) to ~60 digits.
///
/// Uses I_x(a,b) = 1 − I_{1−x}(b,a) to keep the series argument small;
/// the core sum is x^a (1−x)^b / (a B(a,b)) · Σ c_n x^n with
/// c_0 = 1 and c_{n+1} = c_n · x (a+b+n)/(a+n+1).
pub fn oracle_reg_inc_beta(a2: u32, b2: u32, xn: u64, xd: u64) -> f64 {
    assert!(a2 >= 1 && b2 >= 1 && xd >= 1 && xn <= xd);
    if xn == 0 {
        return 0.0;
    }
    if xn == xd {
        return 1.0;
    }
    // reflect when x is past the series' comfortable zone
    // threshold (a+1)/(a+b+2) = (a2+2)/(a2+b2+4) compared as fractions
    if xn * u64::from(a2 + b2 + 4) > u64::from(a2 + 2) * xd {
        return 1.0 - beta_core(b2, a2, xd - xn, xd);
    }
    beta_core(a2, b2, xn, xd)
}

fn beta_core(a2: u32, b2: u32, xn: u64, xd: u64) -> f64 {
    let x = Fx::from_ratio(xn as i64, xd as i64);
    let one_minus_x = Fx::from_ratio((xd - xn) as i64, xd as i64);

    // Σ c_n x^n with c_{n+1}/c_n = x(a+b+n)/(a+n+1); half-integer form
    // x·(a2+b2+2n)/(a2+2n+2)
    let mut term = Fx::from_int(1);
    let mut sum = term.clone();
    let mut converged = false;
    for n in 0..20_000u32 {
        term = term
            .mul(&x)
            .mul(&Fx::from_int((a2 + b2 + 2 * n) as i64))
            .div(&Fx::from_int((a2 + 2 * n + 2) as i64));
        sum = sum.add(&term);
        if term.below_pow10(PREC - 8) {
            converged = true;
            break;
        }
    }
    assert!(converged, "beta oracle series did not converge");

    // B(a,b) = Γ(a)Γ(b)/Γ(a+b), each a rational times √π^{0|1}
    let (ga, ea) = gamma_half(a2);
    let (gb, eb) = gamma_half(b2);
    let (gab, eab) = gamma_half(a2 + b2);
    let mut beta = ga.mul(&gb).div(&gab);
    let pi_pow = ea + eb - eab; // 0, 1 or 2 halves of π
    match pi_pow {
        0 => {}
        1 => beta = beta.mul(&pi().sqrt()),
        2 => beta = beta.mul(&pi()),
        _ => unreachable!(),
    }

    // x^a (1−x)^b / (a B(a,b)) · Σ, with a = a2/2
    let prefactor = pow_half(&x, a2)
        .mul(&pow_half(&one_minus_x, b2))
        .div(&Fx::from_ratio(a2 as i64, 2))
        .div(&beta);
    prefactor.mul(&sum).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_oracle_closed_forms() {
        // P(1, x) = 1 − e^{−x}
        for (xn, xd) in [(1u64, 2u64), (3, 2), (5, 1), (20, 1)] {
            let x = xn as f64 / xd as f64;
            let expect = 1.0 - (-x).exp();
            assert!((oracle_reg_inc_gamma(2, xn, xd) - expect).abs() < 1e-14);
        }
        // P(1/2, x) = erf(√x); erf(1) = 0.8427007929497149
        assert!((oracle_reg_inc_gamma(1, 1, 1) - 0.842_700_792_949_714_9).abs() < 1e-14);
    }

    #[test]
    fn beta_oracle_closed_forms() {
        // I_x(1,1) = x
        assert!((oracle_reg_inc_beta(2, 2, 37, 100) - 0.37).abs() < 1e-14);
        // I_x(1, b): 1 − (1−x)^b
        let expect = 1.0 - (1.0_f64 - 0.3).powi(4);
        assert!((oracle_reg_inc_beta(2, 8, 3, 10) - expect).abs() < 1e-13);
        // I_{1/2}(a, a) = 1/2 by symmetry
        for a2 in [1u32, 3, 8, 15] {
            assert!((oracle_reg_inc_beta(a2, a2, 1, 2) - 0.5).abs() < 1e-13);
        }
    }
}
