use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::series::render_terms;
use super::QSeries;
use crate::error::{Error, Result};
use crate::rational::{denom_i64, fmt_rational, lcm_i64, to_grid, Rational};

/// Finite Laurent polynomial in `x` whose coefficients are [`QSeries`].
///
/// All members share one grid and one truncation order: the coefficient of
/// `x^d q^e` is known for every `d` and every `e < trunc`.
#[derive(Clone, Debug)]
pub struct XSeries {
    scale: i64,
    trunc: Option<i64>,
    terms: BTreeMap<i64, QSeries>,
}

/// First coefficient where two series disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub x_degree: i64,
    pub exponent: String,
    pub lhs: String,
    pub rhs: String,
}

impl XSeries {
    fn normalized(scale: i64, trunc: Option<i64>, terms: BTreeMap<i64, QSeries>) -> XSeries {
        let t = trunc.map(|t| Rational::new(t.into(), scale.into()));
        let mut out = BTreeMap::new();
        for (x, s) in terms {
            let s = match &t {
                Some(t) => s.truncated(t),
                None => s,
            };
            if !s.is_zero() {
                out.insert(x, s);
            }
        }
        // members compact their grids independently; share the coarsest common one
        let mut common = t.as_ref().map(denom_i64).unwrap_or(1);
        for s in out.values() {
            common = lcm_i64(common, s.scale());
        }
        let out = out
            .into_iter()
            .map(|(x, s)| (x, s.rescale(common).expect("lcm grid")))
            .collect();
        XSeries {
            scale: common,
            trunc: t.map(|t| to_grid(&t, common).unwrap()),
            terms: out,
        }
    }

    pub fn zero() -> XSeries {
        XSeries { scale: 1, trunc: None, terms: BTreeMap::new() }
    }

    pub fn one() -> XSeries {
        XSeries::from_q(QSeries::one())
    }

    /// `x^0 · s`, inheriting its truncation.
    pub fn from_q(s: QSeries) -> XSeries {
        let scale = s.scale();
        let trunc = s.trunc_units();
        let mut terms = BTreeMap::new();
        terms.insert(0, s);
        XSeries::normalized(scale, trunc, terms)
    }

    /// `c · x^d · q^e`, exact.
    pub fn monomial(c: Rational, x_deg: i64, exp: &Rational) -> XSeries {
        XSeries::from_q(QSeries::monomial(c, exp)).shift_x(x_deg)
    }

    /// Builds from per-x-degree members, truncating all of them at `trunc`
    /// (or at the smallest member truncation when `trunc` is `None`).
    pub fn from_members<I>(members: I, trunc: Option<&Rational>) -> XSeries
    where
        I: IntoIterator<Item = (i64, QSeries)>,
    {
        let members: Vec<(i64, QSeries)> = members.into_iter().collect();
        let mut t: Option<Rational> = trunc.cloned();
        for (_, s) in &members {
            if let Some(st) = s.trunc() {
                t = Some(match t {
                    Some(cur) if cur <= st => cur,
                    _ => st,
                });
            }
        }
        let d = t.as_ref().map(denom_i64).unwrap_or(1);
        let mut terms: BTreeMap<i64, QSeries> = BTreeMap::new();
        for (x, s) in members {
            let entry = terms.remove(&x);
            let s = match entry {
                Some(prev) => &prev + &s,
                None => s,
            };
            terms.insert(x, s);
        }
        XSeries::normalized(d, t.map(|t| to_grid(&t, d).unwrap()), terms)
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn trunc(&self) -> Option<Rational> {
        self.trunc.map(|t| Rational::new(t.into(), self.scale.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn x_degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn members(&self) -> impl Iterator<Item = (i64, &QSeries)> + '_ {
        self.terms.iter().map(|(x, s)| (*x, s))
    }

    /// Coefficient of `x^d`, carrying the shared truncation.
    pub fn slice(&self, d: i64) -> QSeries {
        match self.terms.get(&d) {
            Some(s) => s.clone(),
            None => match self.trunc() {
                Some(t) => QSeries::zero().truncated(&t),
                None => QSeries::zero(),
            },
        }
    }

    /// Coefficient of `x^d q^e`, `None` when `e >= trunc`.
    pub fn coeff(&self, d: i64, e: &Rational) -> Option<Rational> {
        self.slice(d).coeff(e)
    }

    /// Number of stored `(x^d, q^e)` coefficients.
    pub fn term_count(&self) -> usize {
        self.terms.values().map(QSeries::len).sum()
    }

    /// Lowest q-exponent over all x-degrees.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.values().filter_map(QSeries::valuation).min()
    }

    fn low_bound(&self) -> Option<Rational> {
        self.valuation().or_else(|| self.trunc())
    }

    pub fn truncated(&self, t: &Rational) -> XSeries {
        let t = match self.trunc() {
            Some(cur) if cur < *t => cur,
            _ => t.clone(),
        };
        let d = lcm_i64(self.scale, denom_i64(&t));
        XSeries::normalized(d, Some(to_grid(&t, d).unwrap()), self.terms.clone())
    }

    fn map_members<F: Fn(&QSeries) -> QSeries>(&self, trunc: Option<Rational>, f: F) -> XSeries {
        let terms: BTreeMap<i64, QSeries> = self.terms.iter().map(|(x, s)| (*x, f(s))).collect();
        let d = trunc.as_ref().map(denom_i64).unwrap_or(1);
        XSeries::normalized(d, trunc.map(|t| to_grid(&t, d).unwrap()), terms)
    }

    pub fn scale_by(&self, c: &Rational) -> XSeries {
        self.map_members(self.trunc(), |s| s.scale_by(c))
    }

    /// Multiplies by `q^r`.
    pub fn shift_q(&self, r: &Rational) -> XSeries {
        self.map_members(self.trunc().map(|t| t + r), |s| s.shift(r))
    }

    /// Multiplies by `x^d`.
    pub fn shift_x(&self, d: i64) -> XSeries {
        XSeries {
            scale: self.scale,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(x, s)| (x + d, s.clone())).collect(),
        }
    }

    /// `q ↦ q^m`.
    pub fn substitute_power(&self, m: i64) -> XSeries {
        self.map_members(self.trunc().map(|t| t * Rational::from_integer(m.into())), |s| {
            s.substitute_power(m)
        })
    }

    /// `x ↦ x^m` (m may be zero or negative; m = 0 folds all degrees together).
    pub fn substitute_x(&self, m: i64) -> XSeries {
        let members = self.terms.iter().map(|(x, s)| (x * m, s.clone()));
        match self.trunc() {
            Some(t) => XSeries::from_members(members, Some(&t)),
            None => XSeries::from_members(members, None),
        }
    }

    /// Specialization `x = 1`.
    pub fn fold(&self) -> QSeries {
        self.substitute_x(0).slice(0)
    }

    /// Keeps x-degrees of the given parity.
    pub fn parity_part(&self, odd: bool) -> XSeries {
        XSeries {
            scale: self.scale,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(x, _)| (x.rem_euclid(2) == 1) == odd)
                .map(|(x, s)| (*x, s.clone()))
                .collect(),
        }
    }

    /// Keeps x-degrees in `[lo, hi]`.
    pub fn x_window(&self, lo: i64, hi: i64) -> XSeries {
        XSeries {
            scale: self.scale,
            trunc: self.trunc,
            terms: self.terms.range(lo..=hi).map(|(x, s)| (*x, s.clone())).collect(),
        }
    }

    /// `self · (1 + c·x^d·q^e)`.
    pub fn mul_binomial(&self, c: &Rational, d: i64, e: &Rational) -> XSeries {
        self + &self.shift_x(d).shift_q(e).scale_by(c)
    }

    /// `self / (1 + c·x^d·q^e)`; needs `e > 0` and a truncated input.
    pub fn div_binomial(&self, c: &Rational, d: i64, e: &Rational) -> Result<XSeries> {
        if c.is_zero() {
            return Ok(self.clone());
        }
        if d == 0 {
            let t = self.trunc();
            let mut members = Vec::new();
            for (x, s) in &self.terms {
                members.push((*x, s.div_binomial(c, e)?));
            }
            return Ok(XSeries::from_members(members, t.as_ref()));
        }
        if *e <= Rational::zero() {
            return Err(Error::NotInvertible(format!(
                "1 + c x^{d} q^{} is not invertible as a q-series",
                fmt_rational(e)
            )));
        }
        let Some(t) = self.trunc() else {
            if self.is_zero() {
                return Ok(self.clone());
            }
            return Err(Error::NotInvertible("division of an exact series needs a truncation order".into()));
        };
        // geometric expansion: Σ_m (-c)^m x^{dm} q^{em}, stopping once q^{em} lifts
        // everything past the truncation
        let low = self.low_bound().unwrap_or_else(|| t.clone());
        let mut acc = self.clone();
        let mut term = self.clone();
        let neg_c = -c;
        let mut shift = e.clone();
        while &low + &shift < t {
            term = term.shift_x(d).shift_q(e).scale_by(&neg_c);
            acc = &acc + &term;
            shift += e;
        }
        Ok(acc.truncated(&t))
    }

    /// Lowest `(exponent, x-degree)` below the common truncation where the two
    /// series disagree.
    pub fn first_mismatch(&self, other: &XSeries) -> Option<Mismatch> {
        let t = match (self.trunc(), other.trunc()) {
            (Some(a), Some(b)) => Some(if a < b { a } else { b }),
            (a, None) => a,
            (None, b) => b,
        };
        let mut best: Option<(Rational, i64, Rational, Rational)> = None;
        let degrees: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        for d in degrees {
            let mut a = self.slice(d);
            let mut b = other.slice(d);
            if let Some(t) = &t {
                a = a.truncated(t);
                b = b.truncated(t);
            }
            if let Some((e, x, y)) = a.first_difference(&b) {
                if best.as_ref().is_none_or(|(be, _, _, _)| e < *be) {
                    best = Some((e, d, x, y));
                }
            }
        }
        best.map(|(e, d, x, y)| Mismatch {
            x_degree: d,
            exponent: fmt_rational(&e),
            lhs: fmt_rational(&x),
            rhs: fmt_rational(&y),
        })
    }

    fn mul_impl(a: &XSeries, b: &XSeries) -> XSeries {
        let (Some(la), Some(lb)) = (a.low_bound(), b.low_bound()) else {
            return XSeries::zero();
        };
        let t = match (a.trunc().map(|t| t + &lb), b.trunc().map(|t| t + &la)) {
            (Some(x), Some(y)) => Some(if x < y { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        };
        let mut out: BTreeMap<i64, QSeries> = BTreeMap::new();
        for (xa, sa) in &a.terms {
            for (xb, sb) in &b.terms {
                let mut p = sa * sb;
                if let Some(t) = &t {
                    p = p.truncated(t);
                }
                let key = xa + xb;
                let v = match out.remove(&key) {
                    Some(prev) => &prev + &p,
                    None => p,
                };
                out.insert(key, v);
            }
        }
        let d = t.as_ref().map(denom_i64).unwrap_or(1);
        XSeries::normalized(d, t.map(|t| to_grid(&t, d).unwrap()), out)
    }

    fn add_impl(a: &XSeries, b: &XSeries, negate: bool) -> XSeries {
        let t = match (a.trunc(), b.trunc()) {
            (Some(x), Some(y)) => Some(if x < y { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        };
        let mut out = a.terms.clone();
        for (x, s) in &b.terms {
            let v = match out.remove(x) {
                Some(prev) if negate => &prev - s,
                Some(prev) => &prev + s,
                None if negate => -s,
                None => s.clone(),
            };
            out.insert(*x, v);
        }
        let d = t.as_ref().map(denom_i64).unwrap_or(1);
        XSeries::normalized(d, t.map(|t| to_grid(&t, d).unwrap()), out)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (x, s) in &self.terms {
            let xs = match *x {
                0 => String::new(),
                1 => "·x".to_string(),
                d => format!("·x^{d}"),
            };
            let body = render_terms(s.terms().map(|(e, c)| (e, c.clone())), None, "");
            parts.push(if xs.is_empty() { format!("({body})") } else { format!("({body}){xs}") });
        }
        let body = render_terms(std::iter::empty(), self.trunc().as_ref(), "");
        if parts.is_empty() {
            body
        } else if self.trunc.is_some() {
            format!("{} + {}", parts.join(" + "), body)
        } else {
            parts.join(" + ")
        }
    }
}

impl PartialEq for XSeries {
    fn eq(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }
}

impl fmt::Display for XSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &XSeries {
    type Output = XSeries;
    fn add(self, rhs: &XSeries) -> XSeries {
        XSeries::add_impl(self, rhs, false)
    }
}

impl Sub for &XSeries {
    type Output = XSeries;
    fn sub(self, rhs: &XSeries) -> XSeries {
        XSeries::add_impl(self, rhs, true)
    }
}

impl Mul for &XSeries {
    type Output = XSeries;
    fn mul(self, rhs: &XSeries) -> XSeries {
        XSeries::mul_impl(self, rhs)
    }
}

impl Neg for &XSeries {
    type Output = XSeries;
    fn neg(self) -> XSeries {
        self.scale_by(&-Rational::one())
    }
}

impl From<QSeries> for XSeries {
    fn from(s: QSeries) -> Self {
        XSeries::from_q(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn shared_truncation_after_mul() {
        // (1 + x q) * (1 + x^-1 q) truncated at q^3
        let a = XSeries::one().mul_binomial(&int(1), 1, &int(1)).truncated(&int(3));
        let b = XSeries::one().mul_binomial(&int(1), -1, &int(1));
        let p = &a * &b;
        assert_eq!(p.trunc(), Some(int(3)));
        assert_eq!(p.slice(0), QSeries::from_ints(&[1, 0, 1], Some(3)));
        assert_eq!(p.slice(1), QSeries::from_ints(&[0, 1], Some(3)));
    }

    #[test]
    fn div_binomial_with_x() {
        let t = int(6);
        let one = XSeries::one().truncated(&t);
        // 1/(1 - x q) = Σ x^m q^m
        let inv = one.div_binomial(&int(-1), 1, &int(1)).unwrap();
        for m in 0..6 {
            assert_eq!(inv.coeff(m, &int(m)), Some(int(1)));
        }
        assert_eq!(inv.term_count(), 6);
        let back = inv.mul_binomial(&int(-1), 1, &int(1));
        assert_eq!(back, one);
    }

    #[test]
    fn fold_and_parity() {
        let s = XSeries::from_members(
            [(1, QSeries::monomial(int(2), &rat(1, 2))), (-1, QSeries::monomial(int(3), &rat(1, 2)))],
            Some(&int(4)),
        );
        assert_eq!(s.fold(), QSeries::monomial(int(5), &rat(1, 2)).truncated(&int(4)));
        assert!(s.parity_part(false).is_zero());
        assert_eq!(s.parity_part(true), s);
    }

    #[test]
    fn mismatch_reports_lowest_exponent() {
        let a = XSeries::from_members([(0, QSeries::from_ints(&[1, 1, 1], None))], Some(&int(3)));
        let b = XSeries::from_members(
            [(0, QSeries::from_ints(&[1, 1, 2], None)), (2, QSeries::from_ints(&[0, 7], None))],
            Some(&int(5)),
        );
        let m = a.first_mismatch(&b).unwrap();
        assert_eq!((m.x_degree, m.exponent.as_str()), (2, "1"));
    }
}
