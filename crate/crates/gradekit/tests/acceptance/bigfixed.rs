//! Fixed-point arithmetic on big integers for the high-precision series
//! oracles: values are BigInt mantissas scaled by 10^-PREC (80 decimal
//! digits). Each operation rounds at most one unit in the last place, so a
//! few hundred operations leave 60+ correct digits, far beyond the 1e-12
//! comparisons the oracles serve.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub const PREC: u32 = 80;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fx(BigInt);

fn scale() -> BigInt {
    BigInt::from(10).pow(PREC)
}

impl Fx {
    pub fn from_int(v: i64) -> Fx {
        Fx(BigInt::from(v) * scale())
    }

    pub fn from_bigint_ratio(num: &BigInt, den: &BigInt) -> Fx {
        assert!(!den.is_zero());
        Fx(num * scale() / den)
    }

    pub fn from_ratio(num: i64, den: i64) -> Fx {
        Fx::from_bigint_ratio(&BigInt::from(num), &BigInt::from(den))
    }

    /// Parse a plain decimal literal ("3.14159…").
    pub fn from_decimal_str(s: &str) -> Fx {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        assert!(frac_part.len() <= PREC as usize, "literal longer than PREC");
        let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
        Fx(digits * BigInt::from(10).pow(PREC - frac_part.len() as u32))
    }

    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        Fx(&self.0 - &o.0)
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        Fx(&self.0 * &o.0 / scale())
    }

    pub fn div(&self, o: &Fx) -> Fx {
        assert!(!o.0.is_zero(), "division by zero");
        Fx(&self.0 * scale() / &o.0)
    }

    pub fn powi(&self, e: u32) -> Fx {
        let mut acc = Fx::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root of a non-negative value via integer sqrt of m·10^PREC.
    pub fn sqrt(&self) -> Fx {
        assert!(!self.0.is_negative(), "sqrt of negative");
        Fx((&self.0 * scale()).sqrt())
    }

    /// |value| < 10^-digits
    pub fn below_pow10(&self, digits: u32) -> bool {
        self.0.abs() < BigInt::from(10).pow(PREC - digits)
    }

    pub fn to_f64(&self) -> f64 {
        // mantissa → f64 loses below-ulp detail only; one more rounding
        // from the division keeps ~15 significant digits
        self.0.to_f64().expect("finite mantissa") / 1e80
    }
}

/// e^x for x ≥ 0 by the power series with term recurrence.
pub fn exp_pos(x: &Fx) -> Fx {
    assert!(!x.0.is_negative());
    let mut term = Fx::from_int(1);
    let mut sum = Fx::from_int(1);
    for m in 1..3000 {
        term = term.mul(x).div(&Fx::from_int(m));
        sum = sum.add(&term);
        if term.below_pow10(PREC - 6) {
            return sum;
        }
    }
    panic!("exp series did not converge");
}

/// e^-x = 1 / e^x, avoiding the alternating-series cancellation.
pub fn exp_neg(x: &Fx) -> Fx {
    Fx::from_int(1).div(&exp_pos(x))
}

pub fn pi() -> Fx {
    Fx::from_decimal_str(
        "3.1415926535897932384626433832795028841971693993751058209749445923078164062862",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_round_trip() {
        let a = Fx::from_ratio(1, 3);
        let b = Fx::from_int(3);
        let one = a.mul(&b);
        assert!(one.sub(&Fx::from_int(1)).below_pow10(PREC - 2));
        assert!((Fx::from_ratio(7, 8).to_f64() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn sqrt_of_two() {
        let r = Fx::from_int(2).sqrt();
        let back = r.mul(&r).sub(&Fx::from_int(2));
        assert!(back.below_pow10(PREC - 4));
    }

    #[test]
    fn exp_matches_f64_at_low_precision() {
        for x in [0.5_f64, 1.0, 4.0, 17.5] {
            let fx = Fx::from_ratio((x * 2.0) as i64, 2);
            let got = exp_pos(&fx).to_f64();
            assert!((got - x.exp()).abs() / x.exp() < 1e-12, "x={x}");
        }
    }
}
