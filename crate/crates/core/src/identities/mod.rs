//! Both sides of each identity, and the comparison that produces a report.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::RationalMatrix;
use crate::error::{Error, Result};
use crate::nahm::{capped_sum, nahm_sum, NahmSpec};
use crate::qseries::{
    eta_quotient, partition_series, pochhammer_infinite, pochhammer_infinite_inverse, theta_sum, EtaFactor,
    FactorSpec, Frac, Mismatch, ThetaSpec, XSeries,
};
use crate::rational::{ceil_i64, floor_i64, fmt_rational, int, Rational};

pub mod catalog;

pub use catalog::{
    andrews_rhs, builtin_case, catalog, run_builtin, verify_batch, BuiltinParams, CatalogEntry, Reading,
    FAMILIES,
};

/// One multiplicative piece of a right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `J_m^pow` when `a == 0`, else `J_{a,m}^pow`.
    J { a: u32, m: u32, pow: i32 },
    /// `(±x^d q^e; q^m)_∞^pow` with the sign convention of [`FactorSpec`].
    P { spec: FactorSpec, pow: i32 },
    Theta(ThetaSpec),
    QPow(Rational),
    XPow(i64),
    /// `1/(q;q)_∞`.
    InvQ,
    /// Right side of Andrews' multisum for `(k, i)`, with `x` formal.
    Andrews { k: usize, i: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub factors: Vec<Factor>,
}

/// Sum of products; the right side of every catalog identity has this shape.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RhsExpr {
    pub terms: Vec<Term>,
}

impl RhsExpr {
    pub fn single(factors: Vec<Factor>) -> RhsExpr {
        RhsExpr { terms: vec![Term { coeff: Rational::one(), factors }] }
    }

    pub fn scaled(c: Rational, factors: Vec<Factor>) -> RhsExpr {
        RhsExpr { terms: vec![Term { coeff: c, factors }] }
    }

    pub fn plus(mut self, c: Rational, factors: Vec<Factor>) -> RhsExpr {
        self.terms.push(Term { coeff: c, factors });
        self
    }

    pub fn evaluate(&self, trunc: &Rational) -> Result<XSeries> {
        let mut acc = XSeries::zero().truncated(trunc);
        for t in &self.terms {
            acc = &acc + &t.evaluate(trunc)?;
        }
        Ok(acc)
    }
}

/// Smallest exponent a theta sum can produce.
fn theta_floor(t: &ThetaSpec) -> Rational {
    let center = -&t.lin / (int(2) * &t.quad);
    let at = |n: i64| &t.quad * int(n * n) + &t.lin * int(n) + &t.constant;
    let a = at(floor_i64(&center));
    let b = at(ceil_i64(&center));
    if a < b {
        a
    } else {
        b
    }
}

impl Term {
    pub fn evaluate(&self, trunc: &Rational) -> Result<XSeries> {
        if self.coeff.is_zero() {
            return Ok(XSeries::zero().truncated(trunc));
        }
        // monomial prefactors move the working order; a theta with negative
        // exponents needs the other factors to a higher order
        let mut shift = Rational::zero();
        let mut xshift = 0i64;
        let mut dip = Rational::zero();
        for f in &self.factors {
            match f {
                Factor::QPow(r) => shift += r,
                Factor::XPow(d) => xshift += d,
                Factor::Theta(t) if t.quad.is_positive() => {
                    let v = theta_floor(t);
                    if v.is_negative() {
                        dip += v;
                    }
                }
                _ => {}
            }
        }
        let target = trunc - &shift;
        let work = &target - &dip;
        let mut eta: Vec<EtaFactor> = Vec::new();
        let mut acc = XSeries::one().truncated(&work);
        for f in &self.factors {
            let s = match f {
                Factor::J { a, m, pow } => {
                    eta.push(EtaFactor::new(*a, *m, *pow));
                    continue;
                }
                Factor::P { spec, pow } => {
                    let base = if *pow >= 0 {
                        pochhammer_infinite(spec, &work)?
                    } else {
                        pochhammer_infinite_inverse(spec, &work)?
                    };
                    let mut s = XSeries::one().truncated(&work);
                    for _ in 0..pow.unsigned_abs() {
                        s = &s * &base;
                    }
                    s
                }
                Factor::Theta(t) => theta_sum(t, &work)?,
                Factor::QPow(_) | Factor::XPow(_) => continue,
                Factor::InvQ => XSeries::from_q(partition_series(&work)),
                Factor::Andrews { k, i } => andrews_rhs(*k, *i, &work)?,
            };
            acc = &acc * &s;
        }
        if !eta.is_empty() {
            acc = &acc * &XSeries::from_q(eta_quotient(&eta, &work)?);
        }
        Ok(acc.truncated(&target).scale_by(&self.coeff).shift_q(&shift).shift_x(xshift))
    }
}

/// Left side of an identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Lhs {
    /// A Nahm sum; with `slice = Some(N)` only its `x^N` coefficient, moved to `x^0`.
    Nahm { spec: NahmSpec, slice: Option<i64> },
    /// A sum on a semidefinite form with positive x-weights, exact up to x-degree `x_cap`.
    Capped { a: RationalMatrix, b: Vec<Rational>, c: Rational, w: Vec<i64>, x_cap: i64 },
}

impl Lhs {
    pub fn nahm(spec: NahmSpec) -> Lhs {
        Lhs::Nahm { spec, slice: None }
    }

    pub fn evaluate(&self, trunc: &Rational) -> Result<XSeries> {
        match self {
            Lhs::Nahm { spec, slice: None } => Ok(nahm_sum(spec, trunc)),
            Lhs::Nahm { spec, slice: Some(n) } => Ok(nahm_sum(spec, trunc).x_window(*n, *n).shift_x(-n)),
            Lhs::Capped { a, b, c, w, x_cap } => capped_sum(a, b, c, w, *x_cap, trunc),
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        match self {
            Lhs::Nahm { spec, .. } => spec.matrix(),
            Lhs::Capped { a, .. } => a,
        }
    }

    /// Only x-degrees up to this cap are meaningful.
    pub fn x_cap(&self) -> Option<i64> {
        match self {
            Lhs::Capped { x_cap, .. } => Some(*x_cap),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityCase {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub lhs: Lhs,
    pub rhs: RhsExpr,
    pub trunc: Rational,
    pub notes: Vec<String>,
}

impl IdentityCase {
    pub fn new(name: impl Into<String>, lhs: Lhs, rhs: RhsExpr, trunc: Rational) -> IdentityCase {
        IdentityCase { name: name.into(), params: BTreeMap::new(), lhs, rhs, trunc, notes: Vec::new() }
    }

    pub fn param(mut self, key: &str, v: impl fmt::Display) -> IdentityCase {
        self.params.insert(key.to_string(), v.to_string());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> IdentityCase {
        self.notes.push(n.into());
        self
    }

    fn window(&self, s: XSeries) -> XSeries {
        match self.lhs.x_cap() {
            Some(c) => s.x_window(i64::MIN, c),
            None => s,
        }
    }

    pub fn lhs_series(&self, trunc: &Rational) -> Result<XSeries> {
        Ok(self.window(self.lhs.evaluate(trunc)?))
    }

    pub fn rhs_series(&self, trunc: &Rational) -> Result<XSeries> {
        Ok(self.window(self.rhs.evaluate(trunc)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Match,
    Mismatch,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Match => "match",
            Status::Mismatch => "mismatch",
            Status::Error => "error",
        })
    }
}

/// LDLᵀ pivots witnessing positive definiteness of one matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub matrix: String,
    pub pivots: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportError {
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub trunc: Frac,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<Mismatch>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ReportError>,
}

impl VerifyReport {
    pub fn failed(name: impl Into<String>, params: BTreeMap<String, String>, trunc: &Rational, e: &Error) -> VerifyReport {
        VerifyReport {
            name: name.into(),
            params,
            trunc: Frac::from_rational(trunc),
            status: Status::Error,
            first_mismatch: None,
            elapsed_ms: 0,
            notes: Vec::new(),
            certificates: Vec::new(),
            error: Some(ReportError { message: e.to_string(), exit_code: e.exit_code() }),
        }
    }

    /// 0 for a match, 1 for a mismatch, the error's own code otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Match => 0,
            Status::Mismatch => 1,
            Status::Error => self.error.as_ref().map_or(3, |e| e.exit_code),
        }
    }

    pub fn is_match(&self) -> bool {
        self.status == Status::Match
    }

    /// One line: `name params: status [detail] (ms)`.
    pub fn line(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let head = if params.is_empty() { self.name.clone() } else { format!("{} [{}]", self.name, params.join(", ")) };
        let detail = match (&self.first_mismatch, &self.error) {
            (Some(m), _) => format!(
                " first mismatch at x^{} q^{}: lhs {} rhs {}",
                m.x_degree, m.exponent, m.lhs, m.rhs
            ),
            (None, Some(e)) => format!(": {}", e.message),
            _ => String::new(),
        };
        format!("{head} to q^{}: {}{detail} ({} ms)", self.trunc, self.status, self.elapsed_ms)
    }
}

/// The pivots of `A` and of `A⁻¹`.
pub fn certificates(a: &RationalMatrix) -> Result<Vec<Certificate>> {
    let fmt = |p: &[Rational]| p.iter().map(fmt_rational).collect::<Vec<_>>();
    let f = a.check_positive_definite()?;
    let g = a.inverse()?.check_positive_definite()?;
    Ok(vec![
        Certificate { matrix: "A".into(), pivots: fmt(&f.pivots) },
        Certificate { matrix: "A^-1".into(), pivots: fmt(&g.pivots) },
    ])
}

/// Builds both sides to `trunc` (the case default when `None`) and compares.
pub fn verify_case(case: &IdentityCase, trunc: Option<&Rational>) -> VerifyReport {
    let t = trunc.unwrap_or(&case.trunc).clone();
    let start = Instant::now();
    let run = || -> Result<(Option<Mismatch>, Vec<Certificate>)> {
        let certs = match &case.lhs {
            Lhs::Nahm { spec, .. } => certificates(spec.matrix())?,
            Lhs::Capped { .. } => Vec::new(),
        };
        let (l, r) = rayon::join(|| case.lhs_series(&t), || case.rhs_series(&t));
        Ok((l?.first_mismatch(&r?), certs))
    };
    let mut rep = match run() {
        Ok((m, certificates)) => VerifyReport {
            name: case.name.clone(),
            params: case.params.clone(),
            trunc: Frac::from_rational(&t),
            status: if m.is_none() { Status::Match } else { Status::Mismatch },
            first_mismatch: m,
            elapsed_ms: 0,
            notes: case.notes.clone(),
            certificates,
            error: None,
        },
        Err(e) => {
            let mut r = VerifyReport::failed(case.name.clone(), case.params.clone(), &t, &e);
            r.notes = case.notes.clone();
            r
        }
    };
    rep.elapsed_ms = start.elapsed().as_millis() as u64;
    rep
}

/// Shared shape for checks that are not a (Nahm sum, right side) pair.
pub(crate) fn check_report(
    name: &str,
    params: BTreeMap<String, String>,
    trunc: &Rational,
    f: impl FnOnce() -> Result<(Option<Mismatch>, Vec<String>)>,
) -> VerifyReport {
    let start = Instant::now();
    let mut rep = match f() {
        Ok((m, notes)) => VerifyReport {
            name: name.to_string(),
            params,
            trunc: Frac::from_rational(trunc),
            status: if m.is_none() { Status::Match } else { Status::Mismatch },
            first_mismatch: m,
            elapsed_ms: 0,
            notes,
            certificates: Vec::new(),
            error: None,
        },
        Err(e) => VerifyReport::failed(name, params, trunc, &e),
    };
    rep.elapsed_ms = start.elapsed().as_millis() as u64;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn negative_theta_exponents_are_padded() {
        // q^{-1}·Σ q^{n²-2n} · 1/(q;q)_∞ against the shifted theta; exponents start at -2
        let t = int(6);
        let th = ThetaSpec::plain(int(1), int(-2), int(0));
        let e = RhsExpr::single(vec![Factor::Theta(th.clone()), Factor::InvQ]);
        let s = e.evaluate(&t).unwrap();
        assert_eq!(s.trunc(), Some(t.clone()));
        let shifted = RhsExpr::single(vec![Factor::QPow(int(-1)), Factor::Theta(ThetaSpec::plain(int(1), int(0), int(0))), Factor::InvQ]);
        assert_eq!(shifted.evaluate(&t).unwrap(), s);
        assert_eq!(s.coeff(0, &int(-1)), Some(int(1)));
    }

    #[test]
    fn eta_factors_combine() {
        let t = int(10);
        let e = RhsExpr::single(vec![Factor::J { a: 0, m: 1, pow: 1 }, Factor::InvQ]);
        assert_eq!(e.evaluate(&t).unwrap(), XSeries::one().truncated(&t));
        let half = RhsExpr::scaled(rat(1, 2), vec![Factor::QPow(rat(1, 2))]);
        assert_eq!(half.evaluate(&t).unwrap().coeff(0, &rat(1, 2)), Some(rat(1, 2)));
    }
}
