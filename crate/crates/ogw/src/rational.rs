//! Small helpers for exact rationals: literals, parsing, signs and factorials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::Q;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^k` as a rational.
pub fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn factorial(k: u32) -> Q {
    (1..=k as i64).fold(Q::one(), |acc, i| acc * q(i))
}

/// `∏ r_j!` for a multiplicity vector.
pub fn multi_factorial(r: &[u32]) -> Q {
    r.iter().fold(Q::one(), |acc, &x| acc * factorial(x))
}

/// Parses `"3"`, `"-2"`, `"3/2"` or `"-7/4"`. Decimal points are rejected.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() || s.contains('.') || s.contains('e') || s.contains('E') {
        return None;
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.trim().parse().ok()?;
            let den: BigInt = b.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Q::new(num, den))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Numerator and denominator of a reduced rational, denominator positive.
pub fn num_den(x: &Q) -> (BigInt, BigInt) {
    (x.numer().clone(), x.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_q("3/2"), Some(frac(3, 2)));
        assert_eq!(parse_q("-4"), Some(q(-4)));
        assert_eq!(parse_q("6/-4"), Some(frac(-3, 2)));
        assert_eq!(parse_q("1.5"), None);
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), q(1));
        assert_eq!(factorial(5), q(120));
        assert_eq!(multi_factorial(&[2, 3, 0]), q(12));
        assert_eq!(sign(-3), q(-1));
    }
}
