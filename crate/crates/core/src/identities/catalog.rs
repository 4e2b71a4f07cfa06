//! Builtin identity families, the structural checks, and the default catalog.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{check_report, verify_case, Factor, IdentityCase, Lhs, RhsExpr, VerifyReport};
use crate::bailey::{
    self, lift_param, limit_identity, random_pair, reduce_param, s1_transform, verify_bailey, BaileyPair,
};
use crate::cartan::{dual_data, matrix_2dinv, matrix_d, matrix_g, matrix_t, tilde_a, RationalMatrix};
use crate::error::{Error, Result};
use crate::nahm::{
    inv_qq, verify_durfee, verify_f2_durfee, verify_fk_recursion, verify_lift_identity, NahmSpec,
};
use crate::qseries::{
    pochhammer_finite, pochhammer_infinite_inverse, verify_jtp, FactorSpec, Mismatch, ThetaSpec, XSeries,
};
use crate::rational::{fmt_rational, int, rat, Rational};

/// Every family name accepted by [`run_builtin`].
pub const FAMILIES: &[(&str, &str)] = &[
    ("rr", "Rogers-Ramanujan, lambda in {0, 1}"),
    ("ag", "Andrews-Gordon on 2G_k, params k, s"),
    ("stembridge", "sum on G_k against a product with (-q^{1/2};q), param k"),
    ("kkmm", "parity classes of the 2C(D_k)^-1 sum, params k, r"),
    ("thm11", "D_k identities 1..4, params k, lambda, which"),
    ("thm12", "x-formal tildeA(k, a) identities, params k, a, which = even|odd|full"),
    ("cor", "x^N slice of the full tildeA(k, a) sum, params k, a, N"),
    ("zagier", "rank two tildeA(2, a) at x = q^{lambda/2}, params a, lambda"),
    ("introz", "rank three tildeA(3, a) at x = q^{lambda/2}, params a, lambda"),
    ("wang", "rank three tildeA(3, 2) with x formal"),
    ("andrews", "Andrews' multisum, params k, i, reading = classical|literal"),
    ("section4", "D_3 and D_4 eta-quotient identities, case = halfD3|halfD4|D3|D3inv"),
    ("jtp", "Jacobi triple product, bivariate"),
    ("durfee", "Durfee rectangle identity for |n| <= 4"),
    ("lift", "lifting identity for i, j <= 8"),
    ("fk", "F_k = F_{k+1}, params k, a"),
    ("chain", "Bailey chain replay for identity which at k, lambda"),
    ("route", "Bailey chain against enumeration for tildeA(k, a), params k, a"),
    ("bailey", "closure of S1, lift and reduce on randomized pairs"),
    ("matrix", "matrix-layer checks: inverses, tadpole duality, positivity boundary"),
];

/// How to read the quadratic part of Andrews' multisum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    /// `N_1² + ... + N_{k-1}²`.
    Classical,
    /// `N_1² + ... + N_{k-i}²`, as printed in one source.
    Literal,
}

impl FromStr for Reading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Reading> {
        match s {
            "classical" => Ok(Reading::Classical),
            "literal" => Ok(Reading::Literal),
            _ => Err(Error::InvalidParameter(format!("reading must be classical or literal, got `{s}`"))),
        }
    }
}

impl fmt::Display for Reading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reading::Classical => "classical",
            Reading::Literal => "literal",
        })
    }
}

/// Loosely typed parameters; each family reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub k: Option<usize>,
    pub lambda: Option<Rational>,
    pub which: Option<String>,
    pub a: Option<Rational>,
    pub s: Option<usize>,
    pub i: Option<usize>,
    pub n: Option<i64>,
    pub r: Option<u8>,
    pub case: Option<String>,
    pub reading: Option<Reading>,
}

fn missing(what: &str, family: &str) -> Error {
    Error::InvalidParameter(format!("{family} needs --{what}"))
}

impl BuiltinParams {
    fn k(&self, f: &str) -> Result<usize> {
        self.k.ok_or_else(|| missing("k", f))
    }
    fn lambda(&self, f: &str) -> Result<Rational> {
        self.lambda.clone().ok_or_else(|| missing("lambda", f))
    }
    fn a(&self, f: &str) -> Result<Rational> {
        self.a.clone().ok_or_else(|| missing("a", f))
    }
    fn which(&self, f: &str) -> Result<&str> {
        self.which.as_deref().ok_or_else(|| missing("which", f))
    }

    /// `key=value` pairs for report headers.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("k", self.k.map(|v| v.to_string()));
        put("lambda", self.lambda.as_ref().map(fmt_rational));
        put("which", self.which.clone());
        put("a", self.a.as_ref().map(fmt_rational));
        put("s", self.s.map(|v| v.to_string()));
        put("i", self.i.map(|v| v.to_string()));
        put("N", self.n.map(|v| v.to_string()));
        put("r", self.r.map(|v| v.to_string()));
        put("case", self.case.clone());
        put("reading", self.reading.map(|v| v.to_string()));
        m
    }
}

fn theta(quad: Rational, lin: Rational, constant: Rational) -> ThetaSpec {
    ThetaSpec::plain(quad, lin, constant)
}

fn p(sign: i8, q_exp: Rational, modulus: Rational, x_deg: i64, pow: i32) -> Factor {
    Factor::P { spec: FactorSpec::new(sign, q_exp, modulus, x_deg), pow }
}

fn j(a: u32, m: u32, pow: i32) -> Factor {
    Factor::J { a, m, pow }
}

fn half(r: &Rational) -> Rational {
    r / int(2)
}

fn with_params(case: IdentityCase, p: &BuiltinParams) -> IdentityCase {
    let mut case = case;
    case.params.extend(p.describe());
    case
}

/// The four `D_k` identities; `raw` keeps the `q^{c}` and `1/η` prefactors.
pub fn thm11(k: usize, lambda: &Rational, which: u8, raw: bool) -> Result<IdentityCase> {
    if k < 3 {
        return Err(Error::InvalidDimension { what: "D_k identity", min: 3, got: k });
    }
    if !(1..=4).contains(&which) {
        return Err(Error::InvalidParameter(format!("which must be 1..4, got {which}")));
    }
    let ki = int(k as i64);
    let mut b = vec![Rational::zero(); k];
    if which >= 3 {
        if !lambda.is_integer() || *lambda < int(1) || *lambda >= ki {
            return Err(Error::InvalidParameter(format!(
                "identities 3 and 4 need lambda in {{1, ..., {}}}, got {}",
                k - 1,
                fmt_rational(lambda)
            )));
        }
        let l = lambda.to_integer().try_into().unwrap_or(0usize);
        for i in k - l..=k - 2 {
            b[i - 1] = int((i + l + 1) as i64 - k as i64);
        }
        b[k - 2] = half(lambda);
        b[k - 1] = half(lambda);
    } else {
        b[k - 2] = half(lambda);
        b[k - 1] = -half(lambda);
    }
    let r = if which % 2 == 1 { 0 } else { 1 };
    let c_raw = lambda * lambda / (int(4) * &ki) - rat(1, 24);
    let mut spec = NahmSpec::new(matrix_2dinv(k)?)?.with_b(b)?.with_parity(k - 1, k, r)?;
    // k(n + s)² = k n² + 2ks n + k s²
    let (lin, weight, scale) = match which {
        1 => (lambda.clone(), (int(1), int(0)), int(1)),
        2 => (&ki - lambda, (int(1), int(0)), int(1)),
        3 => (lambda.clone(), (int(1), int(2)), int(1)),
        _ => (-(&ki - lambda), (int(0), int(1)), int(2)),
    };
    let full_const = &lin * &lin / (int(4) * &ki);
    let rhs = if raw {
        spec = spec.with_c(c_raw);
        let th = theta(ki.clone(), lin, full_const).with_weight(weight.0, weight.1);
        RhsExpr::scaled(scale, vec![Factor::QPow(rat(-1, 24)), Factor::InvQ, Factor::Theta(th)])
    } else {
        let cleared = full_const - lambda * lambda / (int(4) * &ki);
        let th = theta(ki.clone(), lin, cleared).with_weight(weight.0, weight.1);
        RhsExpr::scaled(scale, vec![Factor::InvQ, Factor::Theta(th)])
    };
    let trunc = if k <= 4 { int(40) } else { int(25) };
    Ok(IdentityCase::new("thm11", Lhs::nahm(spec), rhs, trunc)
        .param("k", k)
        .param("lambda", fmt_rational(lambda))
        .param("which", which)
        .param("mode", if raw { "raw" } else { "cleared" }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm12Kind {
    Even,
    Odd,
    Full,
}

impl FromStr for Thm12Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Thm12Kind> {
        match s {
            "even" => Ok(Thm12Kind::Even),
            "odd" => Ok(Thm12Kind::Odd),
            "full" => Ok(Thm12Kind::Full),
            _ => Err(Error::InvalidParameter(format!("which must be even, odd or full, got `{s}`"))),
        }
    }
}

fn tilde_spec(k: usize, a: &Rational) -> Result<NahmSpec> {
    if k < 2 {
        return Err(Error::InvalidDimension { what: "tildeA(k, a)", min: 2, got: k });
    }
    let bound = rat(k as i64 - 1, 2);
    if *a <= bound {
        return Err(Error::InvalidParameter(format!(
            "tildeA({k}, {}) is positive definite only for a > (k-1)/2 = {}",
            fmt_rational(a),
            fmt_rational(&bound)
        )));
    }
    let mut w = vec![0; k];
    w[k - 2] = 1;
    w[k - 1] = -1;
    NahmSpec::new(tilde_a(k, a)?)?.with_xweight(w)
}

pub fn thm12(k: usize, a: &Rational, kind: Thm12Kind) -> Result<IdentityCase> {
    let spec = tilde_spec(k, a)?;
    let (spec, rhs) = match kind {
        Thm12Kind::Even => (
            spec.with_parity(k - 1, k, 0)?,
            vec![
                p(-1, int(2) * a, int(4) * a, 2, 1),
                p(-1, int(2) * a, int(4) * a, -2, 1),
                p(1, int(4) * a, int(4) * a, 0, 1),
                Factor::InvQ,
            ],
        ),
        Thm12Kind::Odd => (
            spec.with_parity(k - 1, k, 1)?,
            vec![
                Factor::QPow(half(a)),
                Factor::XPow(1),
                p(-1, int(4) * a, int(4) * a, 2, 1),
                p(-1, int(0), int(4) * a, -2, 1),
                p(1, int(4) * a, int(4) * a, 0, 1),
                Factor::InvQ,
            ],
        ),
        Thm12Kind::Full => (
            spec,
            vec![p(-1, half(a), a.clone(), 1, 1), p(-1, half(a), a.clone(), -1, 1), p(1, a.clone(), a.clone(), 0, 1), Factor::InvQ],
        ),
    };
    let trunc = if k <= 4 { int(30) } else { int(20) };
    let which = match kind {
        Thm12Kind::Even => "even",
        Thm12Kind::Odd => "odd",
        Thm12Kind::Full => "full",
    };
    Ok(IdentityCase::new("thm12", Lhs::nahm(spec), RhsExpr::single(rhs), trunc)
        .param("k", k)
        .param("a", fmt_rational(a))
        .param("which", which))
}

pub fn corollary(k: usize, a: &Rational, n: i64) -> Result<IdentityCase> {
    let spec = tilde_spec(k, a)?;
    let rhs = RhsExpr::single(vec![Factor::QPow(a * int(n * n) / int(2)), Factor::InvQ]);
    Ok(IdentityCase::new("cor", Lhs::Nahm { spec, slice: Some(n) }, rhs, int(25))
        .param("k", k)
        .param("a", fmt_rational(a))
        .param("N", n)
        .note("checked only for a > (k-1)/2, where the sum can be enumerated"))
}

/// `Σ_{j≥s} N_j = Σ_i max(0, i-s+1) n_i` as a linear vector of length `k`.
fn tail_linear(k: usize, s: usize) -> Vec<Rational> {
    (1..=k).map(|i| int((i as i64 - s as i64 + 1).max(0))).collect()
}

pub fn ag(k: usize, s: usize) -> Result<IdentityCase> {
    if k < 1 {
        return Err(Error::InvalidDimension { what: "Andrews-Gordon", min: 1, got: k });
    }
    if s < 1 || s > k + 1 {
        return Err(Error::InvalidParameter(format!("s must lie in 1..{}, got {s}", k + 1)));
    }
    let spec = NahmSpec::new(matrix_g(k)?.scale(&int(2)))?.with_b(tail_linear(k, s))?;
    let m = (2 * k + 3) as u32;
    let rhs = RhsExpr::single(vec![j(s as u32, m, 1), Factor::InvQ]);
    Ok(IdentityCase::new("ag", Lhs::nahm(spec), rhs, int(60)).param("k", k).param("s", s))
}

pub fn rr(lambda: u8) -> Result<IdentityCase> {
    if lambda > 1 {
        return Err(Error::InvalidParameter(format!("lambda must be 0 or 1, got {lambda}")));
    }
    let l = int(lambda as i64);
    let spec = NahmSpec::new(RationalMatrix::from_rows(vec![vec![int(2)]])?)?.with_b(vec![l.clone()])?;
    let rhs = RhsExpr::single(vec![p(1, &l + int(1), int(5), 0, -1), p(1, int(4) - &l, int(5), 0, -1)]);
    Ok(IdentityCase::new("rr", Lhs::nahm(spec), rhs, int(100)).param("lambda", lambda))
}

pub fn stembridge(k: usize) -> Result<IdentityCase> {
    let spec = NahmSpec::new(matrix_g(k)?)?;
    let m = int(k as i64 + 2);
    let rhs = RhsExpr::single(vec![
        p(-1, rat(1, 2), int(1), 0, 1),
        p(1, rat(k as i64 + 1, 2), m.clone(), 0, 1),
        p(1, rat(k as i64 + 3, 2), m.clone(), 0, 1),
        p(1, m.clone(), m, 0, 1),
        Factor::InvQ,
    ]);
    Ok(IdentityCase::new("stembridge", Lhs::nahm(spec), rhs, int(20)).param("k", k))
}

pub fn kkmm(k: usize, r: u8) -> Result<IdentityCase> {
    if r > 1 {
        return Err(Error::InvalidParameter(format!("r must be 0 or 1, got {r}")));
    }
    let spec = NahmSpec::new(matrix_2dinv(k)?)?.with_parity(k - 1, k, r)?;
    let ki = int(k as i64);
    let rr = int(r as i64);
    let rhs = RhsExpr::single(vec![Factor::InvQ, Factor::Theta(theta(ki.clone(), &ki * &rr, &ki * &rr * &rr / int(4)))]);
    Ok(IdentityCase::new("kkmm", Lhs::nahm(spec), rhs, int(30)).param("k", k).param("r", r))
}

fn specialized_rank(k: usize, a: &Rational, lambda: &Rational, name: &str) -> Result<IdentityCase> {
    let spec = tilde_spec(k, a)?;
    let mut b = vec![Rational::zero(); k];
    b[k - 2] = half(lambda);
    b[k - 1] = -half(lambda);
    let spec = NahmSpec::new(spec.matrix().clone())?.with_b(b)?;
    let rhs = RhsExpr::single(vec![Factor::InvQ, Factor::Theta(theta(half(a), half(lambda), int(0)))]);
    Ok(IdentityCase::new(name, Lhs::nahm(spec), rhs, int(30))
        .param("a", fmt_rational(a))
        .param("lambda", fmt_rational(lambda)))
}

pub fn zagier(a: &Rational, lambda: &Rational) -> Result<IdentityCase> {
    specialized_rank(2, a, lambda, "zagier")
}

pub fn intro_z(a: &Rational, lambda: &Rational) -> Result<IdentityCase> {
    specialized_rank(3, a, lambda, "introz")
}

pub fn wang() -> Result<IdentityCase> {
    let spec = tilde_spec(3, &int(2))?;
    let rhs = RhsExpr::single(vec![p(-1, int(1), int(2), 1, 1), p(-1, int(1), int(2), -1, 1), p(1, int(2), int(2), 0, 1), Factor::InvQ]);
    Ok(IdentityCase::new("wang", Lhs::nahm(spec), rhs, int(30)))
}

/// `(1/(xq;q)_∞) Σ_j (-1)^j x^{kj} q^{j(j-1)/2 + kj² + (k-i+1)j} (1 - x^i q^{i(2j+1)}) (xq;q)_j/(q;q)_j`.
pub fn andrews_rhs(k: usize, i: usize, trunc: &Rational) -> Result<XSeries> {
    let (kk, ii) = (k as i64, i as i64);
    let mut sum = XSeries::zero().truncated(trunc);
    let xq = FactorSpec::new(1, int(1), int(1), 1);
    for jj in 0i64.. {
        let e = int(jj * (jj - 1) / 2 + kk * jj * jj + (kk - ii + 1) * jj);
        if &e >= trunc {
            break;
        }
        let sign = if jj % 2 == 0 { int(1) } else { int(-1) };
        let head = XSeries::monomial(sign, kk * jj, &e).truncated(trunc).mul_binomial(&int(-1), ii, &int(ii * (2 * jj + 1)));
        let body = &pochhammer_finite(&xq, jj as usize) * &XSeries::from_q(inv_qq(jj as usize, trunc));
        sum = &sum + &(&head * &body);
    }
    Ok(&sum * &pochhammer_infinite_inverse(&xq, trunc)?)
}

/// Default x-degree cap for the semidefinite literal reading.
pub const ANDREWS_X_CAP: i64 = 12;

pub fn andrews(k: usize, i: usize, reading: Reading) -> Result<IdentityCase> {
    if k < 2 {
        return Err(Error::InvalidDimension { what: "Andrews multisum", min: 2, got: k });
    }
    if i < 1 || i > k {
        return Err(Error::InvalidParameter(format!("i must lie in 1..{k}, got {i}")));
    }
    let d = k - 1;
    let b = tail_linear(d, i);
    let w: Vec<i64> = (1..=d as i64).collect();
    let rhs = RhsExpr::single(vec![Factor::Andrews { k, i }]);
    let lhs = match reading {
        Reading::Classical => Lhs::nahm(NahmSpec::new(matrix_g(d)?.scale(&int(2)))?.with_b(b)?.with_xweight(w)?),
        Reading::Literal => {
            let cap = (k - i) as i64;
            let a = RationalMatrix::from_fn(d, |r, c| int(2 * (r.min(c) as i64 + 1).min(cap)));
            Lhs::Capped { a, b, c: Rational::zero(), w, x_cap: ANDREWS_X_CAP }
        }
    };
    Ok(IdentityCase::new("andrews", lhs, rhs, int(30)).param("k", k).param("i", i).param("reading", reading))
}

pub const SECTION4_CASES: &[&str] = &["halfD3", "halfD4", "D3", "D3inv"];

pub fn section4(which: &str, raw: bool) -> Result<IdentityCase> {
    let jt = |v: &[(u32, u32, i32)]| v.iter().map(|&(a, m, e)| j(a, m, e)).collect::<Vec<_>>();
    let (a, base, c, pre, terms): (RationalMatrix, u32, Rational, Rational, Vec<(Rational, Rational, Vec<Factor>)>) = match which {
        "halfD3" => (
            matrix_d(3)?.scale(&rat(1, 2)),
            2,
            rat(-1, 12),
            rat(-1, 6),
            vec![
                (int(1), int(0), jt(&[(0, 2, 3), (0, 6, 5), (0, 1, -2), (0, 3, -2), (0, 4, -2), (0, 12, -2)])),
                (int(4), int(1), jt(&[(0, 4, 2), (0, 12, 2), (0, 2, -3), (0, 6, -1)])),
            ],
        ),
        "halfD4" => (
            matrix_d(4)?.scale(&rat(1, 2)),
            2,
            rat(-1, 8),
            rat(-1, 4),
            vec![
                (int(1), int(0), jt(&[(0, 2, 5), (0, 4, 1), (0, 1, -4), (0, 8, -2)])),
                (int(8), int(1), jt(&[(0, 4, 3), (0, 8, 2), (0, 2, -5)])),
            ],
        ),
        "D3" => (
            matrix_d(3)?,
            2,
            rat(-1, 14),
            rat(-1, 7),
            vec![
                (rat(1, 2), int(0), jt(&[(0, 2, 11), (1, 14, 1), (12, 28, 1), (0, 1, -6), (0, 4, -6), (0, 28, -1)])),
                (rat(1, 2), int(0), jt(&[(0, 1, 5), (0, 7, 1), (3, 14, 1), (5, 14, 1), (0, 2, -5), (4, 14, -1), (6, 14, -1), (0, 14, -1)])),
                (int(-4), int(2), jt(&[(0, 4, 6), (0, 28, 3), (0, 2, -6), (4, 28, -1), (10, 28, -1), (12, 28, -1)])),
            ],
        ),
        "D3inv" => (
            matrix_d(3)?.inverse()?,
            8,
            rat(-3, 56),
            rat(-3, 7),
            vec![
                (
                    int(1),
                    int(0),
                    jt(&[(0, 8, 1), (0, 56, 2), (0, 112, 1), (24, 112, 1), (40, 112, 1), (0, 4, -1), (12, 112, -1), (28, 112, -1), (32, 112, -1), (44, 112, -1), (48, 112, -1)]),
                ),
                (int(2), int(3), jt(&[(0, 16, 1), (32, 112, 1), (0, 8, -2)])),
            ],
        ),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown case `{other}`; expected one of {}",
                SECTION4_CASES.join(", ")
            )))
        }
    };
    let mut spec = NahmSpec::new(a)?.with_base_power(base)?;
    let mut rhs = RhsExpr::default();
    for (coeff, shift, mut fs) in terms {
        let mut s = shift;
        if raw {
            s += &pre;
        }
        if !s.is_zero() {
            fs.insert(0, Factor::QPow(s));
        }
        rhs = rhs.plus(coeff, fs);
    }
    if raw {
        spec = spec.with_c(c);
    }
    Ok(IdentityCase::new("section4", Lhs::nahm(spec), rhs, int(40))
        .param("case", which)
        .param("mode", if raw { "raw" } else { "cleared" }))
}

/// The (Nahm sum, right side) case behind a family, or `None` for the
/// structural checks.
pub fn builtin_case(family: &str, p: &BuiltinParams, raw: bool) -> Result<Option<IdentityCase>> {
    let case = match family {
        "rr" => {
            let l = p.lambda(family)?;
            if !l.is_integer() || l.is_negative() || l > int(1) {
                return Err(Error::InvalidParameter("lambda must be 0 or 1".into()));
            }
            rr(if l.is_zero() { 0 } else { 1 })?
        }
        "ag" => ag(p.k(family)?, p.s.ok_or_else(|| missing("s", family))?)?,
        "stembridge" => stembridge(p.k(family)?)?,
        "kkmm" => kkmm(p.k(family)?, p.r.ok_or_else(|| missing("r", family))?)?,
        "thm11" => {
            let w: u8 = p
                .which(family)?
                .parse()
                .map_err(|_| Error::InvalidParameter("which must be 1..4".into()))?;
            thm11(p.k(family)?, &p.lambda(family)?, w, raw)?
        }
        "thm12" => thm12(p.k(family)?, &p.a(family)?, p.which.as_deref().unwrap_or("full").parse()?)?,
        "cor" => corollary(p.k(family)?, &p.a(family)?, p.n.ok_or_else(|| missing("n", family))?)?,
        "zagier" => zagier(&p.a(family)?, &p.lambda(family)?)?,
        "introz" => intro_z(&p.a(family)?, &p.lambda(family)?)?,
        "wang" => wang()?,
        "andrews" => andrews(p.k(family)?, p.i.ok_or_else(|| missing("i", family))?, p.reading.unwrap_or(Reading::Classical))?,
        "section4" => section4(p.case.as_deref().ok_or_else(|| missing("case", family))?, raw)?,
        _ => return Ok(None),
    };
    Ok(Some(case))
}

fn mismatch(what: impl Into<String>, got: impl Into<String>) -> Mismatch {
    Mismatch { x_degree: 0, exponent: "0".into(), lhs: what.into(), rhs: got.into() }
}

type Outcome = Result<(Option<Mismatch>, Vec<String>)>;

fn check_jtp(trunc: &Rational) -> Outcome {
    for d in [1, 2] {
        let c = verify_jtp(d, trunc)?;
        if let Some(m) = c.mismatch {
            return Ok((Some(m), vec![format!("x^{d} substitution")]));
        }
    }
    Ok((None, vec![]))
}

fn check_durfee(trunc: &Rational) -> Outcome {
    for n in -4..=4 {
        if let Some(m) = verify_durfee(n, trunc).mismatch {
            return Ok((Some(m), vec![format!("n = {n}")]));
        }
    }
    Ok((None, vec![]))
}

fn check_lift(trunc: &Rational) -> Outcome {
    for ((i, jj), c) in verify_lift_identity(8, 8, trunc) {
        if let Some(m) = c.mismatch {
            return Ok((Some(m), vec![format!("(i, j) = ({i}, {jj})")]));
        }
    }
    Ok((None, vec![]))
}

fn check_fk(k: usize, a: &Rational, trunc: &Rational) -> Outcome {
    let c = verify_fk_recursion(k, a, trunc)?;
    if c.mismatch.is_some() {
        return Ok((c.mismatch, vec![format!("F_{k} against F_{}", k + 1)]));
    }
    if k == 2 {
        let d = verify_f2_durfee(a, trunc)?;
        return Ok((d.mismatch, vec!["F_2 against the theta form".into()]));
    }
    Ok((None, vec![]))
}

fn check_chain(which: u8, k: usize, lambda: &Rational, trunc: &Rational) -> Outcome {
    let r = bailey::proof_chain(which, k, lambda, trunc)?;
    let steps: Vec<&str> = r.steps.iter().map(|s| s.name()).collect();
    let mut notes = vec![format!("chain: {}", steps.join(","))];
    if let Some(pm) = r.pair_check {
        notes.push(format!("final pair fails the defining relation at n = {}", pm.n));
        return Ok((Some(pm.mismatch), notes));
    }
    if let Some(m) = r.sides.mismatch() {
        notes.push("limit identity: beta side against alpha side".into());
        return Ok((Some(m), notes));
    }
    let rhs = thm11(k, lambda, which, false)?.rhs.evaluate(trunc)?;
    if let Some(m) = r.sides.alpha_side.first_mismatch(&rhs) {
        notes.push("alpha side against the theta right side".into());
        return Ok((Some(m), notes));
    }
    Ok((None, notes))
}

fn check_route(k: usize, a: &Rational, trunc: &Rational) -> Outcome {
    let spec = tilde_spec(k, a)?;
    let (even, odd) = crate::nahm::nahm_sum_parity_pair(&spec, k - 1, k, trunc)?;
    for (odd_side, sum) in [(false, even), (true, odd)] {
        let r = bailey::parity_chain(k, a, odd_side, trunc)?;
        let label = if odd_side { "odd" } else { "even" };
        if let Some(m) = r.sides.beta_side.first_mismatch(&sum) {
            return Ok((Some(m), vec![format!("{label} class: chain against enumeration")]));
        }
        if let Some(m) = r.sides.mismatch() {
            return Ok((Some(m), vec![format!("{label} class: limit identity")]));
        }
    }
    Ok((None, vec![]))
}

/// `count` random pairs with `len` terms; each transform must keep the
/// defining relation, and lift/reduce must leave β untouched.
pub fn check_bailey_closure(count: u64, len: usize, trunc: &Rational) -> Outcome {
    let params = [rat(1, 2), int(1), rat(3, 2), int(2)];
    for seed in 0..count {
        let e = params[(seed % 4) as usize].clone();
        let p = random_pair(seed, e, len, trunc)?;
        let outs: [(&str, BaileyPair); 3] = [("s1", s1_transform(&p)), ("lift", lift_param(&p)?), ("reduce", reduce_param(&p)?)];
        for (name, q) in outs {
            if let Some(pm) = verify_bailey(&q)? {
                return Ok((Some(pm.mismatch), vec![format!("seed {seed}, {name}, n = {}", pm.n)]));
            }
            if name != "s1" && q.beta() != p.beta() {
                return Ok((Some(mismatch(format!("seed {seed}: {name} changed beta"), "beta must be fixed")), vec![]));
            }
        }
    }
    let u = BaileyPair::unit(int(0), 6, int(20))?;
    let s = limit_identity(&u, &int(20))?;
    if let Some(m) = s.mismatch() {
        return Ok((Some(m), vec!["unit pair limit".into()]));
    }
    Ok((None, vec![format!("{count} pairs, M = {}", len - 1)]))
}

/// Matrix-layer checks up to rank `kmax`.
pub fn check_matrix(kmax: usize) -> Outcome {
    for k in 3..=kmax {
        let prod = matrix_d(k)?.mul(&matrix_2dinv(k)?);
        if prod != RationalMatrix::identity(k).scale(&int(2)) {
            return Ok((Some(mismatch(format!("C(D_{k}) * 2C(D_{k})^-1"), "not 2I")), vec![]));
        }
    }
    for k in 1..=kmax {
        if matrix_g(k)?.inverse()? != matrix_t(k)? {
            return Ok((Some(mismatch(format!("G_{k}^-1"), "not C(T_k)")), vec![]));
        }
    }
    for k in 2..=kmax.min(8) {
        let bound = rat(k as i64 - 1, 2);
        for (off, want) in [(rat(1, 100), true), (rat(1, 7), true), (int(0), false), (rat(-1, 100), false), (rat(-1, 7), false)] {
            let a = &bound + &off;
            if tilde_a(k, &a)?.is_positive_definite() != want {
                return Ok((Some(mismatch(format!("tildeA({k}, {})", fmt_rational(&a)), format!("positive definite = {}", !want))), vec![]));
            }
        }
    }
    for k in 3..=kmax.min(6) {
        let a = matrix_2dinv(k)?;
        let b: Vec<Rational> = (0..k).map(|i| rat(i as i64, 3)).collect();
        let c = rat(1, 5);
        let (a1, b1, c1) = dual_data(&a, &b, &c)?;
        let (a2, b2, c2) = dual_data(&a1, &b1, &c1)?;
        if a2 != a || b2 != b || c2 != c {
            return Ok((Some(mismatch(format!("dual of dual at k = {k}"), "differs")), vec![]));
        }
    }
    Ok((None, vec![]))
}

/// Default orders for the structural checks.
fn check_default(family: &str) -> Rational {
    match family {
        "jtp" => int(60),
        "fk" => int(10),
        "bailey" => int(25),
        "matrix" => int(0),
        _ => int(30),
    }
}

/// Runs one family with the given parameters. Never panics on bad input;
/// problems become an error report.
pub fn run_builtin(family: &str, p: &BuiltinParams, trunc: Option<&Rational>, raw: bool) -> VerifyReport {
    let params = p.describe();
    match builtin_case(family, p, raw) {
        Ok(Some(case)) => {
            let mut rep = verify_case(&with_params(case.clone(), p), trunc);
            if family == "andrews" && p.reading.unwrap_or(Reading::Classical) == Reading::Classical {
                rep.notes.push(andrews_literal_note(p, trunc));
            }
            rep
        }
        Ok(None) => {
            let t = trunc.cloned().unwrap_or_else(|| check_default(family));
            let run = || -> Outcome {
                match family {
                    "jtp" => check_jtp(&t),
                    "durfee" => check_durfee(&t),
                    "lift" => check_lift(&t),
                    "fk" => check_fk(p.k(family)?, &p.a(family)?, &t),
                    "chain" => {
                        let w: u8 = p.which(family)?.parse().map_err(|_| Error::InvalidParameter("which must be 1..4".into()))?;
                        check_chain(w, p.k(family)?, &p.lambda(family)?, &t)
                    }
                    "route" => check_route(p.k(family)?, &p.a(family)?, &t),
                    "bailey" => check_bailey_closure(30, 7, &t),
                    "matrix" => check_matrix(p.k.unwrap_or(10)),
                    other => Err(Error::InvalidParameter(format!("unknown builtin `{other}`"))),
                }
            };
            check_report(family, params, &t, run)
        }
        Err(e) => {
            let t = trunc.cloned().unwrap_or_else(|| check_default(family));
            VerifyReport::failed(family, params, &t, &e)
        }
    }
}

fn andrews_literal_note(p: &BuiltinParams, trunc: Option<&Rational>) -> String {
    let lit = BuiltinParams { reading: Some(Reading::Literal), ..p.clone() };
    match builtin_case("andrews", &lit, false) {
        Ok(Some(case)) => {
            let r = verify_case(&case, trunc);
            match (&r.first_mismatch, &r.error) {
                (None, None) => format!("literal reading N_1^2+...+N_(k-i)^2: match up to x^{ANDREWS_X_CAP}"),
                (Some(m), _) => format!(
                    "literal reading N_1^2+...+N_(k-i)^2: mismatch at x^{} q^{} (lhs {}, rhs {})",
                    m.x_degree, m.exponent, m.lhs, m.rhs
                ),
                (None, Some(e)) => format!("literal reading N_1^2+...+N_(k-i)^2: error: {}", e.message),
            }
        }
        Ok(None) => unreachable!("andrews is a case family"),
        Err(e) => format!("literal reading: error: {e}"),
    }
}

/// One entry of the default catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub family: &'static str,
    pub params: BuiltinParams,
}

impl CatalogEntry {
    pub fn label(&self) -> String {
        let ps: Vec<String> = self.params.describe().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        if ps.is_empty() {
            self.family.to_string()
        } else {
            format!("{} {}", self.family, ps.join(" "))
        }
    }

    pub fn run(&self, trunc: Option<&Rational>, raw: bool) -> VerifyReport {
        run_builtin(self.family, &self.params, trunc, raw)
    }
}

fn entry(family: &'static str, f: impl FnOnce(&mut BuiltinParams)) -> CatalogEntry {
    let mut params = BuiltinParams::default();
    f(&mut params);
    CatalogEntry { family, params }
}

/// The default catalog: one or a few representatives per family.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut v = Vec::new();
    for l in 0..=1 {
        v.push(entry("rr", |p| p.lambda = Some(int(l))));
    }
    for (k, s) in [(1, 1), (2, 3), (3, 2)] {
        v.push(entry("ag", |p| {
            p.k = Some(k);
            p.s = Some(s)
        }));
    }
    for k in 1..=3 {
        v.push(entry("stembridge", |p| p.k = Some(k)));
    }
    for r in 0..=1 {
        v.push(entry("kkmm", |p| {
            p.k = Some(4);
            p.r = Some(r)
        }));
    }
    for (which, lambda) in [(1, int(0)), (2, rat(1, 3)), (3, int(1)), (4, int(2))] {
        v.push(entry("thm11", |p| {
            p.k = Some(3);
            p.lambda = Some(lambda);
            p.which = Some(which.to_string())
        }));
    }
    for (k, which) in [(2, "full"), (3, "even"), (3, "odd"), (4, "full")] {
        v.push(entry("thm12", |p| {
            p.k = Some(k);
            p.a = Some(rat(k as i64, 2) + rat(1, 4));
            p.which = Some(which.into())
        }));
    }
    for n in [0, 1, -2] {
        v.push(entry("cor", |p| {
            p.k = Some(3);
            p.a = Some(int(2));
            p.n = Some(n)
        }));
    }
    v.push(entry("zagier", |p| {
        p.a = Some(int(2));
        p.lambda = Some(int(1))
    }));
    v.push(entry("introz", |p| {
        p.a = Some(int(2));
        p.lambda = Some(int(1))
    }));
    v.push(entry("wang", |_| {}));
    for (k, i) in [(2, 1), (3, 2), (4, 3)] {
        v.push(entry("andrews", |p| {
            p.k = Some(k);
            p.i = Some(i)
        }));
    }
    for c in SECTION4_CASES {
        v.push(entry("section4", |p| p.case = Some(c.to_string())));
    }
    v.push(entry("jtp", |_| {}));
    v.push(entry("durfee", |_| {}));
    v.push(entry("lift", |_| {}));
    v.push(entry("fk", |p| {
        p.k = Some(2);
        p.a = Some(int(2))
    }));
    for which in 1..=4 {
        v.push(entry("chain", |p| {
            p.k = Some(3);
            p.lambda = Some(int(1));
            p.which = Some(which.to_string())
        }));
    }
    v.push(entry("route", |p| {
        p.k = Some(3);
        p.a = Some(int(2))
    }));
    v.push(entry("bailey", |_| {}));
    v.push(entry("matrix", |_| {}));
    v
}

/// Runs entries concurrently; the output follows the input order.
pub fn verify_batch(entries: &[CatalogEntry], trunc: Option<&Rational>, raw: bool) -> Vec<VerifyReport> {
    entries.par_iter().map(|e| e.run(trunc, raw)).collect()
}
