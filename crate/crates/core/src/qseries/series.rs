use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dense;
use crate::error::{Error, Result};
use crate::rational::{denom_i64, fmt_rational, int, lcm_i64, to_grid, Rational};

/// Truncated formal series in `q` with exact rational coefficients.
///
/// Exponents live on the grid `(1/scale)·Z` and are stored as integers in
/// units of `1/scale`. `trunc` is a strict upper bound: every coefficient at an
/// exponent `>= trunc` is unknown. `trunc == None` means the series is exact
/// (a Laurent polynomial).
#[derive(Clone, Debug)]
pub struct QSeries {
    scale: i64,
    trunc: Option<i64>,
    coeffs: BTreeMap<i64, Rational>,
}

/// Lowest known exponent in grid units: the lowest stored term, else `trunc`.
/// `None` for the exact zero series.
fn low_bound(s: &QSeries) -> Option<i64> {
    s.coeffs.keys().next().copied().or(s.trunc)
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl QSeries {
    /// Builds a series from grid-unit data, dropping zeros and terms at or
    /// above `trunc`, then reduces the grid to the coarsest one that fits.
    pub(crate) fn from_units(scale: i64, trunc: Option<i64>, coeffs: BTreeMap<i64, Rational>) -> Self {
        assert!(scale > 0);
        let mut coeffs = coeffs;
        coeffs.retain(|e, c| !c.is_zero() && trunc.is_none_or(|t| *e < t));
        let mut s = QSeries { scale, trunc, coeffs };
        s.compact();
        s
    }

    fn compact(&mut self) {
        let mut g = self.scale;
        if let Some(t) = self.trunc {
            g = g.gcd(&t);
        }
        for e in self.coeffs.keys() {
            if g == 1 {
                break;
            }
            g = g.gcd(e);
        }
        if g > 1 {
            self.scale /= g;
            self.trunc = self.trunc.map(|t| t / g);
            self.coeffs = std::mem::take(&mut self.coeffs)
                .into_iter()
                .map(|(e, c)| (e / g, c))
                .collect();
        }
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        QSeries { scale: 1, trunc: None, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), &Rational::zero())
    }

    /// `c · q^exp`, exact.
    pub fn monomial(c: Rational, exp: &Rational) -> Self {
        let d = denom_i64(exp);
        let e = to_grid(exp, d).expect("grid exponent");
        let mut m = BTreeMap::new();
        m.insert(e, c);
        Self::from_units(d, None, m)
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(terms: I, trunc: Option<&Rational>) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let terms: Vec<(Rational, Rational)> = terms.into_iter().collect();
        let mut d = trunc.map(denom_i64).unwrap_or(1);
        for (e, _) in &terms {
            d = lcm_i64(d, denom_i64(e));
        }
        let mut m: BTreeMap<i64, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *m.entry(to_grid(&e, d).unwrap()).or_insert_with(Rational::zero) += c;
        }
        Self::from_units(d, trunc.map(|t| to_grid(t, d).unwrap()), m)
    }

    /// Integer-coefficient series `Σ c_i q^i`, i from 0, known below `trunc`.
    pub fn from_ints(cs: &[i64], trunc: Option<i64>) -> Self {
        let m = cs
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as i64, int(c)))
            .collect();
        Self::from_units(1, trunc, m)
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Truncation order as an exponent, `None` if exact.
    pub fn trunc(&self) -> Option<Rational> {
        self.trunc.map(|t| Rational::new(t.into(), self.scale.into()))
    }

    pub(crate) fn trunc_units(&self) -> Option<i64> {
        self.trunc
    }


    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// No stored coefficient (zero below `trunc`).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn exp_of(&self, units: i64) -> Rational {
        Rational::new(units.into(), self.scale.into())
    }

    /// Stored terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Rational, &Rational)> + '_ {
        self.coeffs.iter().map(move |(&e, c)| (self.exp_of(e), c))
    }

    /// Lowest exponent with a nonzero stored coefficient.
    pub fn valuation(&self) -> Option<Rational> {
        self.coeffs.keys().next().map(|&e| self.exp_of(e))
    }

    /// Coefficient of `q^exp`; `None` when `exp >= trunc`.
    pub fn coeff(&self, exp: &Rational) -> Option<Rational> {
        if let Some(t) = self.trunc() {
            if *exp >= t {
                return None;
            }
        }
        match to_grid(exp, self.scale) {
            Some(e) => Some(self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)),
            None => Some(Rational::zero()),
        }
    }

    /// Same series on the finer grid `1/new_scale`.
    pub fn rescale(&self, new_scale: i64) -> Result<QSeries> {
        if new_scale <= 0 || new_scale % self.scale != 0 {
            return Err(Error::IncompatibleScale { from: self.scale, to: new_scale });
        }
        let f = new_scale / self.scale;
        Ok(QSeries {
            scale: new_scale,
            trunc: self.trunc.map(|t| t * f),
            coeffs: self.coeffs.iter().map(|(e, c)| (e * f, c.clone())).collect(),
        })
    }

    /// Exponent indices in units of `1/scale` (used by grid tests and serialization).
    pub fn exponent_units(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    fn on_scale(&self, d: i64) -> QSeries {
        if d == self.scale {
            self.clone()
        } else {
            self.rescale(d).expect("common scale is a multiple")
        }
    }

    pub(crate) fn unify(a: &QSeries, b: &QSeries) -> (QSeries, QSeries, i64) {
        let d = lcm_i64(a.scale, b.scale);
        (a.on_scale(d), b.on_scale(d), d)
    }

    /// Drops everything at or above `t`.
    pub fn truncated(&self, t: &Rational) -> QSeries {
        let d = lcm_i64(self.scale, denom_i64(t));
        let s = self.on_scale(d);
        let t = to_grid(t, d).unwrap();
        QSeries::from_units(d, min_opt(s.trunc, Some(t)), s.coeffs)
    }

    /// Multiplies by the scalar `c`.
    pub fn scale_by(&self, c: &Rational) -> QSeries {
        let coeffs = self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect();
        QSeries::from_units(self.scale, self.trunc, coeffs)
    }

    /// Multiplies by `q^r`.
    pub fn shift(&self, r: &Rational) -> QSeries {
        let d = lcm_i64(self.scale, denom_i64(r));
        let s = self.on_scale(d);
        let off = to_grid(r, d).unwrap();
        let coeffs = s.coeffs.into_iter().map(|(e, c)| (e + off, c)).collect();
        QSeries::from_units(d, s.trunc.map(|t| t + off), coeffs)
    }

    /// `q ↦ q^m`.
    pub fn substitute_power(&self, m: i64) -> QSeries {
        assert!(m > 0, "substitution power must be positive");
        let coeffs = self.coeffs.iter().map(|(e, c)| (e * m, c.clone())).collect();
        QSeries::from_units(self.scale, self.trunc.map(|t| t * m), coeffs)
    }

    /// Reciprocal. The lowest term must be a known nonzero monomial; an exact
    /// input with more than one term has to be truncated first.
    pub fn inverse(&self) -> Result<QSeries> {
        let (&r, c) = self
            .coeffs
            .iter()
            .next()
            .ok_or_else(|| Error::NotInvertible("zero or unknown lowest term".into()))?;
        let t = match self.trunc {
            Some(t) => t,
            None if self.coeffs.len() == 1 => {
                let mut m = BTreeMap::new();
                m.insert(-r, c.recip());
                return Ok(QSeries::from_units(self.scale, None, m));
            }
            None => {
                return Err(Error::NotInvertible(
                    "exact series with several terms needs a truncation order".into(),
                ))
            }
        };
        let mut g = 0i64;
        for e in self.coeffs.keys() {
            g = g.gcd(&(e - r));
        }
        let rel = t - r;
        if g == 0 {
            g = rel;
        }
        let len = ((rel + g - 1) / g) as usize;
        let mut dense_a = vec![Rational::zero(); len];
        for (e, v) in &self.coeffs {
            let i = ((e - r) / g) as usize;
            if i < len {
                dense_a[i] = v.clone();
            }
        }
        let inv = dense::inverse(&dense_a, len);
        let coeffs = inv
            .into_iter()
            .enumerate()
            .map(|(i, v)| (-r + g * i as i64, v))
            .collect();
        Ok(QSeries::from_units(self.scale, Some(t - 2 * r), coeffs))
    }

    /// `self · (1 + c·q^e)`.
    pub fn mul_binomial(&self, c: &Rational, e: &Rational) -> QSeries {
        self + &self.shift(e).scale_by(c)
    }

    /// `self / (1 + c·q^e)` for `e > 0`; needs a truncated input unless `c == 0`.
    pub fn div_binomial(&self, c: &Rational, e: &Rational) -> Result<QSeries> {
        if c.is_zero() {
            return Ok(self.clone());
        }
        if !e.is_positive() {
            return Err(Error::NotInvertible(format!(
                "1 + c q^{} has no unit lowest term",
                fmt_rational(e)
            )));
        }
        let d = lcm_i64(self.scale, denom_i64(e));
        let s = self.on_scale(d);
        let Some(t) = s.trunc else {
            if s.coeffs.is_empty() {
                return Ok(s);
            }
            return Err(Error::NotInvertible("division of an exact series needs a truncation order".into()));
        };
        let step = to_grid(e, d).unwrap();
        let Some(&lo) = s.coeffs.keys().next() else {
            return Ok(s);
        };
        // y = s - c q^e y, solved in increasing exponent order
        let mut y: BTreeMap<i64, Rational> = BTreeMap::new();
        let mut g = step;
        for k in s.coeffs.keys() {
            g = g.gcd(&(k - lo));
        }
        let mut at = lo;
        while at < t {
            let mut v = s.coeffs.get(&at).cloned().unwrap_or_else(Rational::zero);
            if let Some(prev) = y.get(&(at - step)) {
                v -= c * prev;
            }
            if !v.is_zero() {
                y.insert(at, v);
            }
            at += g;
        }
        Ok(QSeries::from_units(d, Some(t), y))
    }

    /// First exponent below the common truncation where the two series differ.
    pub fn first_difference(&self, other: &QSeries) -> Option<(Rational, Rational, Rational)> {
        let (a, b, d) = QSeries::unify(self, other);
        let t = min_opt(a.trunc, b.trunc);
        let keys: std::collections::BTreeSet<i64> =
            a.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
        for e in keys {
            if t.is_some_and(|t| e >= t) {
                break;
            }
            let x = a.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero);
            let y = b.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero);
            if x != y {
                return Some((Rational::new(e.into(), d.into()), x, y));
            }
        }
        None
    }

    fn mul_impl(a: &QSeries, b: &QSeries) -> QSeries {
        let (a, b, d) = QSeries::unify(a, b);
        let (Some(la), Some(lb)) = (low_bound(&a), low_bound(&b)) else {
            return QSeries::zero();
        };
        let t = min_opt(a.trunc.map(|t| t + lb), b.trunc.map(|t| t + la));
        let (Some(&va), Some(&vb)) = (a.coeffs.keys().next(), b.coeffs.keys().next()) else {
            return QSeries::from_units(d, t, BTreeMap::new());
        };
        let ma = *a.coeffs.keys().next_back().unwrap();
        let mb = *b.coeffs.keys().next_back().unwrap();
        let mut g = 0i64;
        for e in a.coeffs.keys() {
            g = g.gcd(&(e - va));
        }
        for e in b.coeffs.keys() {
            g = g.gcd(&(e - vb));
        }
        if g == 0 {
            g = 1;
        }
        let full = ((ma - va) + (mb - vb)) / g + 1;
        let len = match t {
            Some(t) => {
                let room = t - va - vb;
                if room <= 0 {
                    return QSeries::from_units(d, Some(t), BTreeMap::new());
                }
                full.min((room + g - 1) / g)
            }
            None => full,
        } as usize;
        let la_len = (((ma - va) / g) as usize + 1).min(len);
        let lb_len = (((mb - vb) / g) as usize + 1).min(len);
        let na = a.coeffs.len();
        let nb = b.coeffs.len();
        let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
        if na.saturating_mul(nb).saturating_mul(4) < la_len.saturating_mul(lb_len) {
            let limit = va + vb + g * len as i64;
            for (ea, ca) in &a.coeffs {
                for (eb, cb) in &b.coeffs {
                    let e = ea + eb;
                    if e >= limit {
                        break;
                    }
                    *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        } else {
            let mut da = vec![Rational::zero(); la_len];
            for (e, c) in &a.coeffs {
                let i = ((e - va) / g) as usize;
                if i < la_len {
                    da[i] = c.clone();
                }
            }
            let mut db = vec![Rational::zero(); lb_len];
            for (e, c) in &b.coeffs {
                let i = ((e - vb) / g) as usize;
                if i < lb_len {
                    db[i] = c.clone();
                }
            }
            for (i, c) in dense::convolve(&da, &db, len).into_iter().enumerate() {
                if !c.is_zero() {
                    out.insert(va + vb + g * i as i64, c);
                }
            }
        }
        QSeries::from_units(d, t, out)
    }

    fn add_impl(a: &QSeries, b: &QSeries, sign: &Rational) -> QSeries {
        let (a, b, d) = QSeries::unify(a, b);
        let t = min_opt(a.trunc, b.trunc);
        let mut coeffs = a.coeffs;
        for (e, c) in b.coeffs {
            *coeffs.entry(e).or_insert_with(Rational::zero) += c * sign;
        }
        QSeries::from_units(d, t, coeffs)
    }

    /// `Σ c_e q^e` rendered as `c q^e + ... + O(q^t)`.
    pub fn render(&self) -> String {
        render_terms(self.terms().map(|(e, c)| (e, c.clone())), self.trunc().as_ref(), "")
    }
}

pub(crate) fn render_terms<I>(terms: I, trunc: Option<&Rational>, suffix: &str) -> String
where
    I: Iterator<Item = (Rational, Rational)>,
{
    let mut out = String::new();
    for (e, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = if e.is_zero() {
            String::new()
        } else if e.is_one() {
            "q".to_string()
        } else if e.is_integer() && !e.is_negative() {
            format!("q^{}", e)
        } else {
            format!("q^({})", fmt_rational(&e))
        };
        let mono = format!("{mono}{suffix}");
        if mono.is_empty() {
            out.push_str(&fmt_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}{}", fmt_rational(&mag), mono));
        }
    }
    if let Some(t) = trunc {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        if t.is_integer() && !t.is_negative() {
            out.push_str(&format!("O(q^{})", t));
        } else {
            out.push_str(&format!("O(q^({}))", fmt_rational(t)));
        }
    } else if out.is_empty() {
        out.push('0');
    }
    out
}

impl PartialEq for QSeries {
    /// Equal when every coefficient below the smaller truncation agrees.
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add_impl(self, rhs, &Rational::one())
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::add_impl(self, rhs, &-Rational::one())
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul_impl(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale_by(&-Rational::one())
    }
}

impl Add for QSeries {
    type Output = QSeries;
    fn add(self, rhs: QSeries) -> QSeries {
        &self + &rhs
    }
}

impl Sub for QSeries {
    type Output = QSeries;
    fn sub(self, rhs: QSeries) -> QSeries {
        &self - &rhs
    }
}

impl Mul for QSeries {
    type Output = QSeries;
    fn mul(self, rhs: QSeries) -> QSeries {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn q(cs: &[i64], t: i64) -> QSeries {
        QSeries::from_ints(cs, Some(t))
    }

    #[test]
    fn rescale_examples() {
        let s = q(&[1, 1], 2);
        let r = s.rescale(2).unwrap();
        assert_eq!(r.exponent_units(), vec![0, 2]);
        let h = QSeries::from_terms([(int(0), int(1)), (rat(1, 2), int(1))], None);
        assert_eq!(h.rescale(6).unwrap().exponent_units(), vec![0, 3]);
        let m = QSeries::monomial(int(1), &int(1));
        assert_eq!(m.rescale(3).unwrap(), m);
        assert!(matches!(h.rescale(3), Err(Error::IncompatibleScale { .. })));
    }

    #[test]
    fn ring_examples() {
        let a = QSeries::from_ints(&[1, -1], None);
        let b = QSeries::from_ints(&[0, 1], None);
        assert_eq!(&a + &b, QSeries::one());
        let c = QSeries::from_ints(&[1, 1], None);
        assert_eq!(&a * &c, QSeries::from_ints(&[1, 0, -1], None));
        let s = c.shift(&rat(1, 24));
        assert_eq!(s.scale(), 24);
        assert_eq!(s.exponent_units(), vec![1, 25]);
    }

    #[test]
    fn truncation_propagates() {
        let a = q(&[1, 2, 3], 3);
        let b = QSeries::monomial(int(1), &int(2));
        let p = &a * &b;
        assert_eq!(p.trunc(), Some(int(5)));
        let c = q(&[0, 1], 4); // valuation 1, trunc 4
        let p = &a * &c;
        // min(0 + 4, 1 + 3)
        assert_eq!(p.trunc(), Some(int(4)));
    }

    #[test]
    fn inverse_examples() {
        let a = QSeries::from_ints(&[1, -1], None).truncated(&int(5));
        assert_eq!(a.inverse().unwrap(), q(&[1, 1, 1, 1, 1], 5));
        let b = QSeries::from_ints(&[0, 1, -1], None).truncated(&int(4));
        let inv = b.inverse().unwrap();
        let expect = QSeries::from_terms(
            [(int(-1), int(1)), (int(0), int(1)), (int(1), int(1)), (int(2), int(1))],
            Some(&int(3)),
        );
        assert_eq!(inv, expect);
        assert_eq!(inv.trunc(), Some(int(2)));
        assert!(QSeries::zero().truncated(&int(3)).inverse().is_err());
        assert!(QSeries::from_ints(&[1, 1], None).inverse().is_err());
    }

    #[test]
    fn div_binomial_is_inverse_of_mul() {
        let a = q(&[1, 3, 0, 2, 5], 9);
        let c = rat(-2, 3);
        let e = rat(3, 2);
        let back = a.mul_binomial(&c, &e).div_binomial(&c, &e).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn substitute_power_examples() {
        let a = QSeries::from_ints(&[1, 1], None);
        assert_eq!(a.substitute_power(2), QSeries::from_ints(&[1, 0, 1], None));
        let h = QSeries::monomial(int(1), &rat(1, 2));
        assert_eq!(h.substitute_power(2), QSeries::monomial(int(1), &int(1)));
    }

    #[test]
    fn render_reads_naturally() {
        let a = QSeries::from_terms([(int(0), int(1)), (int(1), int(-2)), (rat(1, 2), int(3))], Some(&int(3)));
        assert_eq!(a.render(), "1 + 3q^(1/2) - 2q + O(q^3)");
    }
}
