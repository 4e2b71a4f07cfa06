//! Exact rational scalars.
//!
//! [`Rational`] is `num_rational::BigRational`, always kept in lowest terms with a
//! positive denominator. This module adds the handful of helpers the rest of the
//! crate needs on top of it (parsing `p/q`, floor/ceil, lcm of denominators).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// `n/1`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den`, normalized. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Renders as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("exponent out of i64 range")
}

pub fn ceil_i64(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("exponent out of i64 range")
}

/// Denominator as `i64`; exponent grids never need more.
pub fn denom_i64(r: &Rational) -> i64 {
    r.denom().to_i64().expect("denominator out of i64 range")
}

pub fn lcm_i64(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// `r * d` when it is an integer.
pub fn to_grid(r: &Rational, d: i64) -> Option<i64> {
    let scaled = r * int(d);
    if scaled.is_integer() {
        scaled.to_integer().to_i64()
    } else {
        None
    }
}

/// Exact integer square-root bounds: returns the integer interval of `n` with
/// `(n - center)^2 < radius_sq`, or `None` when empty.
pub fn open_interval_around(center: &Rational, radius_sq: &Rational) -> Option<(i64, i64)> {
    if !radius_sq.is_positive() {
        return None;
    }
    let c = center.to_f64().unwrap_or(0.0);
    let r = radius_sq.to_f64().unwrap_or(f64::MAX).sqrt();
    let inside = |n: i64| {
        let d = int(n) - center;
        &d * &d < *radius_sq
    };
    let mut lo = (c - r).floor() as i64 - 1;
    let mut hi = (c + r).ceil() as i64 + 1;
    // float estimate may be off by one either way; settle exactly.
    while inside(lo) {
        lo -= 1;
    }
    while !inside(lo + 1) && lo + 1 <= hi {
        lo += 1;
    }
    while inside(hi) {
        hi += 1;
    }
    while !inside(hi - 1) && hi - 1 >= lo {
        hi -= 1;
    }
    let (lo, hi) = (lo + 1, hi - 1);
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(fmt_rational(&int(7)), "7");
    }

    #[test]
    fn interval_is_exact() {
        // (n - 1/2)^2 < 4  <=>  n in {-1, 0, 1, 2}
        assert_eq!(open_interval_around(&rat(1, 2), &int(4)), Some((-1, 2)));
        // boundary excluded: (n)^2 < 4 -> |n| <= 1
        assert_eq!(open_interval_around(&int(0), &int(4)), Some((-1, 1)));
        assert_eq!(open_interval_around(&int(0), &int(0)), None);
        assert_eq!(open_interval_around(&rat(1, 2), &rat(1, 4)), None);
    }
}
