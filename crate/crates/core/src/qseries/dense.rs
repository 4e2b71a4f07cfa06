//! Dense coefficient kernels used behind the sparse series types.
//!
//! Rational inputs are brought to a common denominator so that the inner loops
//! run on integers: `i128` with overflow checks first, `BigInt` when that fails.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

fn common_denominator(xs: &[Rational]) -> BigInt {
    xs.iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scaled_numerators(xs: &[Rational], den: &BigInt) -> Vec<BigInt> {
    xs.iter()
        .map(|x| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (den / x.denom())
            }
        })
        .collect()
}

fn narrow(xs: &[BigInt]) -> Option<Vec<i128>> {
    xs.iter().map(|x| x.to_i64().map(i128::from)).collect()
}

/// Truncated convolution over a ring with checked arithmetic; `None` on overflow.
pub(crate) fn convolve_checked<T>(a: &[T], b: &[T], len: usize) -> Option<Vec<T>>
where
    T: Clone + Zero + CheckedAdd + CheckedMul,
{
    let mut out = vec![T::zero(); len];
    let nz_b: Vec<usize> = (0..b.len()).filter(|&j| !b[j].is_zero()).collect();
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for &j in &nz_b {
            let k = i + j;
            if k >= len {
                break;
            }
            let p = ai.checked_mul(&b[j])?;
            out[k] = out[k].checked_add(&p)?;
        }
    }
    Some(out)
}

/// `c = a * b` truncated to `len` entries.
pub(crate) fn convolve(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let da = common_denominator(a);
    let db = common_denominator(b);
    let na = scaled_numerators(a, &da);
    let nb = scaled_numerators(b, &db);
    let den = da * db;
    let ints: Vec<BigInt> = match (narrow(&na), narrow(&nb)) {
        (Some(sa), Some(sb)) => match convolve_checked(&sa, &sb, len) {
            Some(c) => c.into_iter().map(BigInt::from).collect(),
            None => convolve_checked(&na, &nb, len).expect("bigint arithmetic cannot overflow"),
        },
        _ => convolve_checked(&na, &nb, len).expect("bigint arithmetic cannot overflow"),
    };
    ints.into_iter()
        .map(|n| Rational::new(n, den.clone()))
        .collect()
}

/// Reciprocal of an integer power series with constant term 1.
fn inverse_unit_checked<T>(a: &[T], len: usize) -> Option<Vec<T>>
where
    T: Clone + Zero + One + CheckedAdd + CheckedMul + std::ops::Neg<Output = T>,
{
    let mut b: Vec<T> = Vec::with_capacity(len);
    let nz: Vec<usize> = (1..a.len()).filter(|&j| !a[j].is_zero()).collect();
    for n in 0..len {
        if n == 0 {
            b.push(T::one());
            continue;
        }
        let mut s = T::zero();
        for &j in &nz {
            if j > n {
                break;
            }
            s = s.checked_add(&a[j].checked_mul(&b[n - j])?)?;
        }
        b.push(-s);
    }
    Some(b)
}

/// Reciprocal of `a` (with `a[0] != 0`) truncated to `len` entries.
pub(crate) fn inverse(a: &[Rational], len: usize) -> Vec<Rational> {
    assert!(!a[0].is_zero(), "inverse needs a nonzero constant term");
    let unit_lead = a[0].is_integer() && a[0].numer().abs().is_one();
    if unit_lead && a.iter().all(|x| x.is_integer()) {
        let lead_is_one = a[0].is_positive();
        let ints: Vec<BigInt> = a.iter().map(|x| x.to_integer()).collect();
        // 1/a = -1/(-a) when a_0 = -1.
        let normalized: Vec<BigInt> = if lead_is_one {
            ints
        } else {
            ints.into_iter().map(|x| -x).collect()
        };
        let out: Vec<BigInt> = match narrow(&normalized) {
            Some(small) => match inverse_unit_checked(&small, len) {
                Some(v) => v.into_iter().map(BigInt::from).collect(),
                None => inverse_unit_checked(&normalized, len).expect("bigint"),
            },
            None => inverse_unit_checked(&normalized, len).expect("bigint"),
        };
        return out
            .into_iter()
            .map(|n| {
                let v = Rational::from_integer(n);
                if lead_is_one {
                    v
                } else {
                    -v
                }
            })
            .collect();
    }
    let inv0 = a[0].recip();
    let mut b: Vec<Rational> = Vec::with_capacity(len);
    for n in 0..len {
        if n == 0 {
            b.push(inv0.clone());
            continue;
        }
        let mut s = Rational::zero();
        for j in 1..=n.min(a.len().saturating_sub(1)) {
            if !a[j].is_zero() {
                s += &a[j] * &b[n - j];
            }
        }
        b.push(-s * &inv0);
    }
    b
}

/// Multiplies a dense integer vector by `(1 - q^step)^power` in place
/// (negative powers divide). `None` on overflow.
pub(crate) fn apply_unit_factor<T>(c: &mut [T], step: usize, power: i64) -> Option<()>
where
    T: Clone + Zero + CheckedAdd + CheckedSub,
{
    if step == 0 || step >= c.len() {
        return Some(());
    }
    if power >= 0 {
        for _ in 0..power {
            for i in (step..c.len()).rev() {
                c[i] = c[i].checked_sub(&c[i - step])?;
            }
        }
    } else {
        for _ in 0..(-power) {
            for i in step..c.len() {
                c[i] = c[i].checked_add(&c[i - step])?;
            }
        }
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn convolve_matches_schoolbook() {
        let a = vec![int(1), int(-1)];
        let b = vec![int(1), int(1)];
        assert_eq!(convolve(&a, &b, 3), vec![int(1), int(0), int(-1)]);
        let h = vec![rat(1, 2), rat(1, 3)];
        assert_eq!(convolve(&h, &h, 3), vec![rat(1, 4), rat(1, 3), rat(1, 9)]);
    }

    #[test]
    fn inverse_geometric_and_negative_lead() {
        let a = vec![int(1), int(-1)];
        assert_eq!(inverse(&a, 4), vec![int(1); 4]);
        let a = vec![int(-1), int(1)];
        assert_eq!(inverse(&a, 3), vec![int(-1); 3]);
        let a = vec![int(2), int(1)];
        assert_eq!(inverse(&a, 3), vec![rat(1, 2), rat(-1, 4), rat(1, 8)]);
    }

    #[test]
    fn unit_factor_roundtrip() {
        let mut c = vec![1i128, 0, 0, 0, 0, 0];
        apply_unit_factor(&mut c, 2, -1).unwrap();
        assert_eq!(c, vec![1, 0, 1, 0, 1, 0]);
        apply_unit_factor(&mut c, 2, 1).unwrap();
        assert_eq!(c, vec![1, 0, 0, 0, 0, 0]);
    }
}
