//! q-Pochhammer symbols, theta sums and eta quotients.

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dense::apply_unit_factor;
use super::{Mismatch, QSeries, XSeries};
use crate::error::{Error, Result};
use crate::rational::{ceil_i64, fmt_rational, int, open_interval_around, Rational};

/// One family of factors `(1 - sign·x^x_deg·q^(q_exp + k·modulus))`, k = 0, 1, ...
///
/// `sign = +1` gives `1 - ...`, `sign = -1` gives `1 + ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpec {
    pub sign: i8,
    pub q_exp: Rational,
    pub x_deg: i64,
    pub modulus: Rational,
}

impl FactorSpec {
    pub fn new(sign: i8, q_exp: Rational, modulus: Rational, x_deg: i64) -> FactorSpec {
        assert!(sign == 1 || sign == -1, "factor sign must be +1 or -1");
        FactorSpec { sign, q_exp, x_deg, modulus }
    }

    /// `(q^e; q^m)` without x.
    pub fn q(q_exp: Rational, modulus: Rational) -> FactorSpec {
        FactorSpec::new(1, q_exp, modulus, 0)
    }

    /// Coefficient `c` in `1 + c·x^d·q^e`.
    fn binomial_coeff(&self) -> Rational {
        int(-(self.sign as i64))
    }

    fn exponent(&self, k: i64) -> Rational {
        &self.q_exp + &self.modulus * int(k)
    }

    fn check_infinite(&self) -> Result<()> {
        if !self.modulus.is_positive() {
            return Err(Error::Divergent(format!(
                "infinite product needs a positive modulus, got {}",
                fmt_rational(&self.modulus)
            )));
        }
        if self.q_exp.is_negative() || (self.x_deg == 0 && self.q_exp.is_zero()) {
            return Err(Error::Divergent(format!(
                "infinite product factor with q-exponent {} and x-degree {} does not converge",
                fmt_rational(&self.q_exp),
                self.x_deg
            )));
        }
        Ok(())
    }
}

/// `Π_{k<n} (1 - sign·x^d·q^(e + k·m))`, exact.
pub fn pochhammer_finite(f: &FactorSpec, n: usize) -> XSeries {
    let c = f.binomial_coeff();
    let mut acc = XSeries::one();
    for k in 0..n as i64 {
        acc = acc.mul_binomial(&c, f.x_deg, &f.exponent(k));
    }
    acc
}

/// Reciprocal of [`pochhammer_finite`] truncated at `trunc`.
pub fn pochhammer_finite_inverse(f: &FactorSpec, n: usize, trunc: &Rational) -> Result<XSeries> {
    let c = f.binomial_coeff();
    let mut acc = XSeries::one().truncated(trunc);
    for k in 0..n as i64 {
        acc = acc.div_binomial(&c, f.x_deg, &f.exponent(k))?;
    }
    Ok(acc)
}

/// Number of factors of an infinite product whose exponent is below `trunc`.
fn live_factors(f: &FactorSpec, trunc: &Rational) -> i64 {
    let mut k = 0;
    while f.exponent(k) < *trunc {
        k += 1;
    }
    k
}

/// `(f; q)_∞` truncated at `trunc`.
pub fn pochhammer_infinite(f: &FactorSpec, trunc: &Rational) -> Result<XSeries> {
    f.check_infinite()?;
    let c = f.binomial_coeff();
    let mut acc = XSeries::one().truncated(trunc);
    for k in 0..live_factors(f, trunc) {
        acc = acc.mul_binomial(&c, f.x_deg, &f.exponent(k));
    }
    Ok(acc)
}

/// `1 / (f; q)_∞` truncated at `trunc`.
pub fn pochhammer_infinite_inverse(f: &FactorSpec, trunc: &Rational) -> Result<XSeries> {
    f.check_infinite()?;
    let c = f.binomial_coeff();
    let mut acc = XSeries::one().truncated(trunc);
    for k in 0..live_factors(f, trunc) {
        acc = acc.div_binomial(&c, f.x_deg, &f.exponent(k))?;
    }
    Ok(acc)
}

/// `Σ_{n∈Z} (c0 + c1·n) · q^(quad·n² + lin·n + constant) · x^(xlin·n + xconst)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSpec {
    pub quad: Rational,
    pub lin: Rational,
    pub constant: Rational,
    pub weight: (Rational, Rational),
    pub xlin: i64,
    pub xconst: i64,
}

impl ThetaSpec {
    /// Unit weight, no x.
    pub fn plain(quad: Rational, lin: Rational, constant: Rational) -> ThetaSpec {
        ThetaSpec {
            quad,
            lin,
            constant,
            weight: (Rational::one(), Rational::zero()),
            xlin: 0,
            xconst: 0,
        }
    }

    pub fn with_weight(mut self, c0: Rational, c1: Rational) -> ThetaSpec {
        self.weight = (c0, c1);
        self
    }

    pub fn with_x(mut self, xlin: i64, xconst: i64) -> ThetaSpec {
        self.xlin = xlin;
        self.xconst = xconst;
        self
    }

    /// Exact range of `n` with exponent `< trunc`.
    pub fn index_range(&self, trunc: &Rational) -> Result<Option<(i64, i64)>> {
        if !self.quad.is_positive() {
            return Err(Error::Divergent("theta sum needs a positive quadratic coefficient".into()));
        }
        // quad (n - c)^2 + constant - quad c^2 < trunc
        let center = -&self.lin / (int(2) * &self.quad);
        let radius_sq = (trunc - &self.constant) / &self.quad + &center * &center;
        Ok(open_interval_around(&center, &radius_sq))
    }
}

pub fn theta_sum(spec: &ThetaSpec, trunc: &Rational) -> Result<XSeries> {
    let mut members: Vec<(i64, QSeries)> = Vec::new();
    if let Some((lo, hi)) = spec.index_range(trunc)? {
        for n in lo..=hi {
            let nn = int(n);
            let w = &spec.weight.0 + &spec.weight.1 * &nn;
            if w.is_zero() {
                continue;
            }
            let e = &spec.quad * &nn * &nn + &spec.lin * &nn + &spec.constant;
            members.push((spec.xlin * n + spec.xconst, QSeries::monomial(w, &e)));
        }
    }
    Ok(XSeries::from_members(members, Some(trunc)))
}

/// Outcome of comparing two sides of an identity.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub lhs: XSeries,
    pub rhs: XSeries,
    pub mismatch: Option<Mismatch>,
}

impl Comparison {
    pub fn new(lhs: XSeries, rhs: XSeries) -> Comparison {
        let mismatch = lhs.first_mismatch(&rhs);
        Comparison { lhs, rhs, mismatch }
    }

    pub fn matches(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Jacobi triple product with `x ↦ x^x_deg`:
/// `Σ x^(dn) q^(n²) = (-q x^d, -q x^-d, q²; q²)_∞`.
pub fn verify_jtp(x_deg: i64, trunc: &Rational) -> Result<Comparison> {
    let sum = theta_sum(&ThetaSpec::plain(int(1), int(0), int(0)).with_x(x_deg, 0), trunc)?;
    let prod = jtp_product(x_deg, trunc)?;
    Ok(Comparison::new(sum, prod))
}

fn jtp_product(x_deg: i64, trunc: &Rational) -> Result<XSeries> {
    let a = pochhammer_infinite(&FactorSpec::new(-1, int(1), int(2), x_deg), trunc)?;
    let b = pochhammer_infinite(&FactorSpec::new(-1, int(1), int(2), -x_deg), trunc)?;
    let c = pochhammer_infinite(&FactorSpec::q(int(2), int(2)), trunc)?;
    Ok(&(&a * &b) * &c)
}

/// One factor of an eta quotient: `J_m` when `a == 0`, else `J_{a,m}`, to the power `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaFactor {
    pub a: u32,
    pub m: u32,
    pub e: i32,
}

impl EtaFactor {
    pub fn new(a: u32, m: u32, e: i32) -> EtaFactor {
        EtaFactor { a, m, e }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || (self.a != 0 && self.a >= self.m) {
            return Err(Error::InvalidParameter(format!(
                "J({}, {}) needs m >= 1 and 0 <= a < m",
                self.a, self.m
            )));
        }
        Ok(())
    }

    /// Exponents `s` of the unit factors `(1 - q^s)` below `len`.
    fn unit_steps(&self, len: usize) -> Vec<usize> {
        let m = self.m as usize;
        let mut steps: Vec<usize> = (1..).map(|j| j * m).take_while(|&s| s < len).collect();
        if self.a != 0 {
            let a = self.a as usize;
            for start in [a, m - a] {
                steps.extend((0..).map(|j| start + j * m).take_while(|&s| s < len));
            }
        }
        steps
    }
}

fn eta_dense<T>(factors: &[EtaFactor], len: usize) -> Option<Vec<T>>
where
    T: Clone + Zero + One + CheckedAdd + CheckedSub,
{
    let mut c = vec![T::zero(); len];
    if len > 0 {
        c[0] = T::one();
    }
    for f in factors {
        for s in f.unit_steps(len) {
            apply_unit_factor(&mut c, s, f.e as i64)?;
        }
    }
    Some(c)
}

/// `Π J^e` expanded below `trunc`.
pub fn eta_quotient(factors: &[EtaFactor], trunc: &Rational) -> Result<QSeries> {
    for f in factors {
        f.validate()?;
    }
    let len = ceil_i64(trunc).max(0) as usize;
    let coeffs: Vec<BigInt> = match eta_dense::<i128>(factors, len) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => eta_dense::<BigInt>(factors, len).expect("bigint arithmetic cannot overflow"),
    };
    Ok(QSeries::from_terms(
        coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (int(i as i64), Rational::from_integer(c))),
        Some(trunc),
    ))
}

/// `1/(q;q)_∞` below `trunc`.
pub fn partition_series(trunc: &Rational) -> QSeries {
    eta_quotient(&[EtaFactor::new(0, 1, -1)], trunc).expect("J_1 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ints(cs: &[i64], t: i64) -> XSeries {
        XSeries::from_q(QSeries::from_ints(cs, Some(t)))
    }

    #[test]
    fn finite_pochhammer_examples() {
        let qq = FactorSpec::q(int(1), int(1));
        assert_eq!(pochhammer_finite(&qq, 1), XSeries::from_q(QSeries::from_ints(&[1, -1], None)));
        assert_eq!(pochhammer_finite(&qq, 0), XSeries::one());
        // (xq;q)_2 = 1 - x(q + q^2) + x^2 q^3
        let xq = FactorSpec::new(1, int(1), int(1), 1);
        let p = pochhammer_finite(&xq, 2);
        assert!(p.trunc().is_none());
        assert_eq!(p.slice(1), QSeries::from_ints(&[0, -1, -1], None));
        assert_eq!(p.slice(2), QSeries::from_ints(&[0, 0, 0, 1], None));
    }

    #[test]
    fn infinite_pochhammer_examples() {
        let e = pochhammer_infinite(&FactorSpec::q(int(1), int(1)), &int(8)).unwrap();
        assert_eq!(e, ints(&[1, -1, -1, 0, 0, 1, 0, 1], 8));
        let p = pochhammer_infinite(&FactorSpec::new(-1, int(2), int(4), 0), &int(5)).unwrap();
        assert_eq!(p, ints(&[1, 0, 1, 0, 0], 5));
        let x = pochhammer_infinite(&FactorSpec::new(1, int(1), int(1), 1), &int(4)).unwrap();
        assert_eq!(x.slice(0), QSeries::from_ints(&[1], Some(4)));
        assert_eq!(x.slice(1), QSeries::from_ints(&[0, -1, -1, -1], Some(4)));
        assert_eq!(x.slice(2), QSeries::from_ints(&[0, 0, 0, 1], Some(4)));
    }

    #[test]
    fn divergent_specs_rejected() {
        let bad = FactorSpec::q(int(0), int(1));
        assert!(matches!(pochhammer_infinite(&bad, &int(3)), Err(Error::Divergent(_))));
        let bad = FactorSpec::q(int(1), int(0));
        assert!(matches!(pochhammer_infinite(&bad, &int(3)), Err(Error::Divergent(_))));
    }

    #[test]
    fn theta_examples() {
        let t = theta_sum(&ThetaSpec::plain(int(1), int(0), int(0)), &int(10)).unwrap();
        assert_eq!(t, ints(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2], 10));
        let w = ThetaSpec::plain(int(2), int(1), int(0)).with_weight(int(1), int(2));
        let t = theta_sum(&w, &int(11)).unwrap();
        assert_eq!(t, ints(&[1, -1, 0, 3, 0, 0, -3, 0, 0, 0, 5], 11));
        let x = ThetaSpec::plain(int(2), int(0), int(0)).with_x(2, 0);
        let t = theta_sum(&x, &int(9)).unwrap();
        assert_eq!(t.term_count(), 5);
        assert_eq!(t.coeff(-4, &int(8)), Some(int(1)));
        assert_eq!(t.coeff(2, &int(2)), Some(int(1)));
        assert!(theta_sum(&ThetaSpec::plain(int(0), int(0), int(0)), &int(3)).is_err());
    }

    #[test]
    fn jtp_examples() {
        let c = verify_jtp(1, &int(9)).unwrap();
        assert!(c.matches());
        assert_eq!(c.rhs.slice(1), QSeries::monomial(int(1), &int(1)).truncated(&int(9)));
        assert_eq!(c.rhs.slice(0), QSeries::from_ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0], Some(9)));
        assert_eq!(c.rhs.fold(), QSeries::from_ints(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2], Some(9)).truncated(&int(9)));
    }

    #[test]
    fn eta_examples() {
        let p = eta_quotient(&[EtaFactor::new(0, 1, -1)], &int(5)).unwrap();
        assert_eq!(p, QSeries::from_ints(&[1, 1, 2, 3, 5], Some(5)));
        // J_{1,5} carries the (q^5;q^5) factor too; dividing it back out leaves
        // the Rogers-Ramanujan product 1/(q,q^4;q^5)_∞.
        let g = eta_quotient(&[EtaFactor::new(1, 5, -1), EtaFactor::new(0, 5, 1)], &int(7)).unwrap();
        assert_eq!(g, QSeries::from_ints(&[1, 1, 1, 1, 2, 2, 3], Some(7)));
        let rr = eta_quotient(&[EtaFactor::new(1, 5, -1)], &int(7)).unwrap();
        assert_eq!(rr, QSeries::from_ints(&[1, 1, 1, 1, 2, 3, 4], Some(7)));
        // J_{1,5}^{-1} = 1/((q,q^4,q^5;q^5)_∞)
        let direct = {
            let t = int(7);
            let a = pochhammer_infinite_inverse(&FactorSpec::q(int(1), int(5)), &t).unwrap();
            let b = pochhammer_infinite_inverse(&FactorSpec::q(int(4), int(5)), &t).unwrap();
            let c = pochhammer_infinite_inverse(&FactorSpec::q(int(5), int(5)), &t).unwrap();
            (&(&a * &b) * &c).fold()
        };
        assert_eq!(rr, direct);
        let one = eta_quotient(&[EtaFactor::new(0, 2, 1), EtaFactor::new(0, 2, -1)], &int(9)).unwrap();
        assert_eq!(one, QSeries::one().truncated(&int(9)));
        assert!(eta_quotient(&[EtaFactor::new(5, 5, 1)], &int(3)).is_err());
        let half = eta_quotient(&[EtaFactor::new(0, 1, 1)], &rat(7, 2)).unwrap();
        assert_eq!(half.trunc(), Some(rat(7, 2)));
    }
}
