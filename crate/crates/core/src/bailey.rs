//! Bailey pairs relative to `a = q^e`, stored as finite prefixes.
//!
//! `(α, β)` is a pair when `β_n = Σ_{j≤n} α_j / ((q;q)_{n-j} (q^{e+1};q)_{n+j})`
//! for every stored `n`. The transforms here keep that relation on the prefix:
//! each output entry only depends on input entries with the same or smaller index.

use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nahm::inv_qq;
use crate::qseries::{pochhammer_infinite_inverse, FactorSpec, Mismatch, XSeries};
use crate::rational::{fmt_rational, int, rat, Rational};

#[derive(Clone, Debug)]
pub struct BaileyPair {
    e: Rational,
    alpha: Vec<XSeries>,
    beta: Vec<XSeries>,
    trunc: Rational,
}

/// How `x` enters a pair: kept formal, or specialized to `q^μ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XArg {
    Formal,
    QPower(Rational),
}

impl XArg {
    /// `c · x^d · q^e`.
    fn term(&self, c: Rational, d: i64, e: &Rational) -> XSeries {
        match self {
            XArg::Formal => XSeries::monomial(c, d, e),
            XArg::QPower(mu) => XSeries::monomial(c, 0, &(e + mu * int(d))),
        }
    }
}

fn check_param(e: &Rational) -> Result<()> {
    // (q^{e+1};q)_m vanishes when e is a negative integer
    if e.is_integer() && e.is_negative() {
        return Err(Error::SingularParameter(format!("a = q^{} makes (aq;q)_n vanish", fmt_rational(e))));
    }
    Ok(())
}

/// `1/(q^{e+1};q)_m` for `m ≤ max`.
fn aq_inverses(e: &Rational, max: usize, trunc: &Rational) -> Result<Vec<XSeries>> {
    let f = FactorSpec::q(e + int(1), int(1));
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = XSeries::one().truncated(trunc);
    out.push(acc.clone());
    for m in 0..max {
        acc = acc.div_binomial(&int(-1), 0, &(f.q_exp.clone() + int(m as i64)))?;
        out.push(acc.clone());
    }
    Ok(out)
}

fn qq_inverses(max: usize, trunc: &Rational) -> Vec<XSeries> {
    (0..=max).map(|m| XSeries::from_q(inv_qq(m, trunc))).collect()
}

/// `q^{e·n + n²}`.
fn weight(e: &Rational, n: usize) -> Rational {
    let n = int(n as i64);
    e * &n + &n * &n
}

/// `β` from `α` by the defining relation.
pub fn beta_from_alpha(e: &Rational, alpha: &[XSeries], trunc: &Rational) -> Result<Vec<XSeries>> {
    check_param(e)?;
    let m = alpha.len().saturating_sub(1);
    let qq = qq_inverses(m, trunc);
    let aq = aq_inverses(e, 2 * m, trunc)?;
    Ok((0..alpha.len())
        .map(|n| {
            let mut s = XSeries::zero().truncated(trunc);
            for (j, a) in alpha.iter().enumerate().take(n + 1) {
                if a.is_zero() && a.trunc().is_none() {
                    continue;
                }
                s = &s + &(&(a * &qq[n - j]) * &aq[n + j]);
            }
            s.truncated(trunc)
        })
        .collect())
}

/// First failure of the defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMismatch {
    pub n: usize,
    pub mismatch: Mismatch,
}

impl BaileyPair {
    pub fn new(e: Rational, alpha: Vec<XSeries>, beta: Vec<XSeries>, trunc: Rational) -> Result<BaileyPair> {
        check_param(&e)?;
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::InvalidParameter(format!(
                "pair prefixes must be nonempty and of equal length, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        let alpha = alpha.into_iter().map(|s| s.truncated(&trunc)).collect();
        let beta = beta.into_iter().map(|s| s.truncated(&trunc)).collect();
        Ok(BaileyPair { e, alpha, beta, trunc })
    }

    /// Pair whose `β` is computed from `α`.
    pub fn from_alpha(e: Rational, alpha: Vec<XSeries>, trunc: Rational) -> Result<BaileyPair> {
        let beta = beta_from_alpha(&e, &alpha, &trunc)?;
        BaileyPair::new(e, alpha, beta, trunc)
    }

    /// `α_n = δ_{n0}`, `β_n = 1/((q;q)_n (aq;q)_n)`.
    pub fn unit(e: Rational, len: usize, trunc: Rational) -> Result<BaileyPair> {
        check_param(&e)?;
        let mut alpha = vec![XSeries::zero(); len];
        alpha[0] = XSeries::one();
        let qq = qq_inverses(len - 1, &trunc);
        let aq = aq_inverses(&e, len - 1, &trunc)?;
        let beta = (0..len).map(|n| &qq[n] * &aq[n]).collect();
        BaileyPair::new(e, alpha, beta, trunc)
    }

    pub fn param_exp(&self) -> &Rational {
        &self.e
    }

    /// Largest stored index `M`.
    pub fn max_index(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn alpha(&self) -> &[XSeries] {
        &self.alpha
    }

    pub fn beta(&self) -> &[XSeries] {
        &self.beta
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    /// Copy with `β_n` replaced; for negative controls.
    pub fn with_beta(&self, n: usize, b: XSeries) -> BaileyPair {
        let mut p = self.clone();
        p.beta[n] = b.truncated(&self.trunc);
        p
    }

    pub fn with_alpha(&self, n: usize, a: XSeries) -> BaileyPair {
        let mut p = self.clone();
        p.alpha[n] = a.truncated(&self.trunc);
        p
    }

    /// Lowest exponent stored anywhere in the pair, capped at 0.
    fn low_valuation(&self) -> Rational {
        self.alpha
            .iter()
            .chain(&self.beta)
            .filter_map(|s| s.valuation())
            .fold(Rational::zero(), |m, v| if v < m { v } else { m })
    }
}

/// Recomputes each `β_n` from `α` and reports the first disagreement.
pub fn verify_bailey(p: &BaileyPair) -> Result<Option<PairMismatch>> {
    let want = beta_from_alpha(&p.e, &p.alpha, &p.trunc)?;
    for (n, (got, w)) in p.beta.iter().zip(&want).enumerate() {
        if let Some(mismatch) = got.first_mismatch(w) {
            return Ok(Some(PairMismatch { n, mismatch }));
        }
    }
    Ok(None)
}

/// `α'_n = a^n q^{n²} α_n`, `β'_n = Σ_{r≤n} a^r q^{r²} β_r / (q;q)_{n-r}`.
pub fn s1_transform(p: &BaileyPair) -> BaileyPair {
    let qq = qq_inverses(p.max_index(), &p.trunc);
    let alpha = p.alpha.iter().enumerate().map(|(n, a)| a.shift_q(&weight(&p.e, n))).collect();
    let shifted: Vec<XSeries> = p.beta.iter().enumerate().map(|(r, b)| b.shift_q(&weight(&p.e, r))).collect();
    let beta = (0..p.beta.len())
        .map(|n| {
            let mut s = XSeries::zero().truncated(&p.trunc);
            for r in 0..=n {
                s = &s + &(&shifted[r] * &qq[n - r]);
            }
            s.truncated(&p.trunc)
        })
        .collect();
    BaileyPair { e: p.e.clone(), alpha, beta, trunc: p.trunc.clone() }
}

/// `a ↦ aq`: `α'_n = (1 - aq^{2n+1}) a^n q^{n²} / (1 - aq) · Σ_{r≤n} a^{-r} q^{-r²} α_r`, same `β`.
pub fn lift_param(p: &BaileyPair) -> Result<BaileyPair> {
    let e1 = &p.e + int(1);
    if e1.is_zero() {
        return Err(Error::SingularParameter("lift needs a ≠ q^{-1}".into()));
    }
    let t = &p.trunc;
    let mut partial = XSeries::zero();
    let mut alpha = Vec::with_capacity(p.alpha.len());
    for (n, a) in p.alpha.iter().enumerate() {
        let w = weight(&p.e, n);
        partial = &partial + &a.shift_q(&-w.clone());
        let num = partial.shift_q(&w).mul_binomial(&int(-1), 0, &(&p.e + int(2 * n as i64 + 1)));
        let v = if e1.is_positive() {
            num.truncated(t).div_binomial(&int(-1), 0, &e1)?
        } else {
            // 1/(1 - q^{e+1}) with e+1 < 0: -q^{-(e+1)} / (1 - q^{-(e+1)})
            let s = -&e1;
            num.shift_q(&s).truncated(&(t + &s)).div_binomial(&int(-1), 0, &s)?.scale_by(&int(-1))
        };
        alpha.push(v.truncated(t));
    }
    Ok(BaileyPair { e: e1, alpha, beta: p.beta.clone(), trunc: t.clone() })
}

/// `a ↦ a/q`: `α̃_0 = α_0`,
/// `α̃_n = (1-a)(α_n/(1-aq^{2n}) - aq^{2n-2} α_{n-1}/(1-aq^{2n-2}))`, same `β`.
pub fn reduce_param(p: &BaileyPair) -> Result<BaileyPair> {
    if p.e.is_zero() {
        return Err(Error::SingularParameter("reduce needs a ≠ 1".into()));
    }
    let e0 = &p.e - int(1);
    check_param(&e0)?;
    let t = &p.trunc;
    let div = |s: &XSeries, ex: &Rational| -> Result<XSeries> {
        if ex.is_positive() {
            s.div_binomial(&int(-1), 0, ex)
        } else if ex.is_zero() {
            Err(Error::SingularParameter("1 - aq^{2n} vanishes".into()))
        } else {
            let m = -ex;
            Ok(s.shift_q(&m).truncated(&(t + &m)).div_binomial(&int(-1), 0, &m)?.scale_by(&int(-1)))
        }
    };
    let mut alpha = vec![p.alpha[0].clone()];
    for n in 1..p.alpha.len() {
        let two_n = int(2 * n as i64);
        let first = div(&p.alpha[n], &(&p.e + &two_n))?;
        let second = div(&p.alpha[n - 1].shift_q(&(&p.e + &two_n - int(2))), &(&p.e + &two_n - int(2)))?;
        let v = (&first - &second).mul_binomial(&int(-1), 0, &p.e);
        alpha.push(v.truncated(t));
    }
    Ok(BaileyPair { e: e0, alpha, beta: p.beta.clone(), trunc: t.clone() })
}

/// Both sides of `Σ a^n q^{n²} β_n = (1/(aq;q)_∞) Σ a^n q^{n²} α_n` below `trunc`.
#[derive(Clone, Debug)]
pub struct LimitSides {
    pub beta_side: XSeries,
    pub alpha_side: XSeries,
}

impl LimitSides {
    pub fn mismatch(&self) -> Option<Mismatch> {
        self.beta_side.first_mismatch(&self.alpha_side)
    }
}

/// Smallest `M` whose first omitted term `q^{e(M+1)+(M+1)²}` times the lowest
/// stored exponent clears `trunc`.
pub fn required_length(p: &BaileyPair, trunc: &Rational) -> usize {
    let v = p.low_valuation();
    let mut m = 0usize;
    while weight(&p.e, m + 1) + &v < *trunc {
        m += 1;
    }
    m
}

pub fn limit_identity(p: &BaileyPair, trunc: &Rational) -> Result<LimitSides> {
    if trunc > &p.trunc {
        return Err(Error::InvalidParameter(format!(
            "pair is only known below q^{}, asked for q^{}",
            fmt_rational(&p.trunc),
            fmt_rational(trunc)
        )));
    }
    let need = required_length(p, trunc);
    if need > p.max_index() {
        return Err(Error::InsufficientLength { have: p.max_index(), need });
    }
    let mut bs = XSeries::zero().truncated(trunc);
    let mut als = XSeries::zero().truncated(trunc);
    for n in 0..=p.max_index() {
        let w = weight(&p.e, n);
        bs = &bs + &p.beta[n].shift_q(&w);
        als = &als + &p.alpha[n].shift_q(&w);
    }
    let inv = pochhammer_infinite_inverse(&FactorSpec::q(&p.e + int(1), int(1)), trunc)?;
    Ok(LimitSides { beta_side: bs.truncated(trunc), alpha_side: (&als * &inv).truncated(trunc) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainStep {
    S1,
    Lift,
    Reduce,
}

impl FromStr for ChainStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<ChainStep> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(ChainStep::S1),
            "lift" => Ok(ChainStep::Lift),
            "reduce" => Ok(ChainStep::Reduce),
            other => Err(Error::InvalidParameter(format!("unknown chain step `{other}`"))),
        }
    }
}

impl ChainStep {
    pub fn name(self) -> &'static str {
        match self {
            ChainStep::S1 => "s1",
            ChainStep::Lift => "lift",
            ChainStep::Reduce => "reduce",
        }
    }
}

/// Parses `s1,s1,lift,reduce`; an empty string is the empty chain.
pub fn parse_chain(s: &str) -> Result<Vec<ChainStep>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn apply_chain(p: &BaileyPair, steps: &[ChainStep]) -> Result<BaileyPair> {
    let mut cur = p.clone();
    for s in steps {
        cur = match s {
            ChainStep::S1 => s1_transform(&cur),
            ChainStep::Lift => lift_param(&cur)?,
            ChainStep::Reduce => reduce_param(&cur)?,
        };
    }
    Ok(cur)
}

/// `β_s = Σ_{r=-s}^{s} q^{c r²} x^{2r} / ((q;q)_{s+r} (q;q)_{s-r})` paired with
/// `α_0 = 1`, `α_r = q^{c r²}(x^{2r} + x^{-2r})`, relative to 1, where `c = 2a+1-k`.
pub fn pair_even(k: usize, a: &Rational, x: &XArg, len: usize, trunc: &Rational) -> Result<BaileyPair> {
    let c = int(2) * a + int(1) - int(k as i64);
    symmetric_even_pair(&c, x, int(1), len, trunc)
}

/// `α_0 = 1`, `α_r = 2q^{r²}`: the even pair at `c = 1` with `x = 1`.
pub fn pair_two_q_square(len: usize, trunc: &Rational) -> Result<BaileyPair> {
    symmetric_even_pair(&int(1), &XArg::QPower(int(0)), int(1), len, trunc)
}

fn symmetric_even_pair(c: &Rational, x: &XArg, scale: Rational, len: usize, trunc: &Rational) -> Result<BaileyPair> {
    let qq = qq_inverses(2 * len, trunc);
    let mut alpha = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    for r in 0..len as i64 {
        let e = c * int(r * r);
        alpha.push(if r == 0 {
            x.term(scale.clone(), 0, &e)
        } else {
            &x.term(scale.clone(), 2 * r, &e) + &x.term(scale.clone(), -2 * r, &e)
        });
    }
    for s in 0..len as i64 {
        let mut b = XSeries::zero().truncated(trunc);
        for r in -s..=s {
            let e = c * int(r * r);
            let t = &(&x.term(scale.clone(), 2 * r, &e) * &qq[(s + r) as usize]) * &qq[(s - r) as usize];
            b = &b + &t;
        }
        beta.push(b);
    }
    BaileyPair::new(int(0), alpha, beta, trunc.clone())
}

/// Relative to `q`: `α_r = q^{c(r²+r)}(x^{2r+1} + x^{-2r-1})`,
/// `β_s = (1-q) Σ_{r=-s-1}^{s} q^{c(r²+r)} x^{2r+1} / ((q;q)_{s-r} (q;q)_{s+r+1})`, `c = 2a+1-k`.
pub fn pair_odd(k: usize, a: &Rational, x: &XArg, len: usize, trunc: &Rational) -> Result<BaileyPair> {
    let c = int(2) * a + int(1) - int(k as i64);
    let qq = qq_inverses(2 * len + 1, trunc);
    let mut alpha = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    for r in 0..len as i64 {
        let e = &c * int(r * r + r);
        alpha.push(&x.term(int(1), 2 * r + 1, &e) + &x.term(int(1), -2 * r - 1, &e));
    }
    for s in 0..len as i64 {
        let mut b = XSeries::zero().truncated(trunc);
        for r in -s - 1..=s {
            let e = &c * int(r * r + r);
            let t = &(&x.term(int(1), 2 * r + 1, &e) * &qq[(s - r) as usize]) * &qq[(s + r + 1) as usize];
            b = &b + &t;
        }
        beta.push(b.mul_binomial(&int(-1), 0, &int(1)));
    }
    BaileyPair::new(int(1), alpha, beta, trunc.clone())
}

/// Relative to `q`: `α_r = q^{r²+r}`, `β_s = (1-q) Σ_{r=0}^{s} q^{r²+r} / ((q;q)_{s-r} (q;q)_{s+r+1})`.
pub fn pair_q_square_plus(len: usize, trunc: &Rational) -> Result<BaileyPair> {
    let qq = qq_inverses(2 * len + 1, trunc);
    let alpha = (0..len as i64).map(|r| XSeries::monomial(int(1), 0, &int(r * r + r))).collect();
    let beta = (0..len as i64)
        .map(|s| {
            let mut b = XSeries::zero().truncated(trunc);
            for r in 0..=s {
                let t = &(&XSeries::monomial(int(1), 0, &int(r * r + r)) * &qq[(s - r) as usize]) * &qq[(s + r + 1) as usize];
                b = &b + &t;
            }
            b.mul_binomial(&int(-1), 0, &int(1))
        })
        .collect();
    BaileyPair::new(int(1), alpha, beta, trunc.clone())
}

/// A pair with small random polynomial `α_n` (support in `[n, n+3]`) and `β`
/// derived from the defining relation.
pub fn random_pair(seed: u64, e: Rational, len: usize, trunc: &Rational) -> Result<BaileyPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = (0..len as i64)
        .map(|n| {
            let members = (0..4).filter_map(|j| {
                let num: i64 = rng.gen_range(-3..=3);
                let den: i64 = rng.gen_range(1..=3);
                (num != 0).then(|| XSeries::monomial(rat(num, den), 0, &int(n + j)))
            });
            members.fold(XSeries::zero(), |a, b| &a + &b)
        })
        .collect();
    BaileyPair::from_alpha(e, alpha, trunc.clone())
}

/// Names accepted by [`builtin_pair`].
pub const BUILTIN_PAIRS: &[&str] = &["unit", "even", "odd", "two-q-square", "q-square-plus", "random"];

/// Parameters for [`builtin_pair`]; unused fields are ignored by each pair.
#[derive(Clone, Debug)]
pub struct PairParams {
    pub k: usize,
    pub a: Rational,
    pub e: Rational,
    pub x: XArg,
    pub len: usize,
    pub seed: u64,
}

impl Default for PairParams {
    fn default() -> PairParams {
        PairParams { k: 3, a: int(2), e: int(0), x: XArg::Formal, len: 9, seed: 1 }
    }
}

pub fn builtin_pair(name: &str, p: &PairParams, trunc: &Rational) -> Result<BaileyPair> {
    match name {
        "unit" => BaileyPair::unit(p.e.clone(), p.len, trunc.clone()),
        "even" => pair_even(p.k, &p.a, &p.x, p.len, trunc),
        "odd" => pair_odd(p.k, &p.a, &p.x, p.len, trunc),
        "two-q-square" => pair_two_q_square(p.len, trunc),
        "q-square-plus" => pair_q_square_plus(p.len, trunc),
        "random" => random_pair(p.seed, p.e.clone(), p.len, trunc),
        other => Err(Error::InvalidParameter(format!(
            "unknown pair `{other}`; expected one of {}",
            BUILTIN_PAIRS.join(", ")
        ))),
    }
}

/// Result of replaying one of the four chains behind the `D_k` identities
/// at `x = q^{λ/2}`: both sides of the final limiting identity, with the
/// outer prefactor applied, normalized so that they should equal the
/// cleared Nahm sum.
#[derive(Clone, Debug)]
pub struct ChainReplay {
    pub steps: Vec<ChainStep>,
    pub pair_check: Option<PairMismatch>,
    pub sides: LimitSides,
}

/// Replays the chain for identity `which ∈ 1..=4` at rank `k` and shift `λ`.
pub fn proof_chain(which: u8, k: usize, lambda: &Rational, trunc: &Rational) -> Result<ChainReplay> {
    if k < 3 {
        return Err(Error::InvalidDimension { what: "proof chain", min: 3, got: k });
    }
    let half_k = rat(k as i64, 2);
    let x = XArg::QPower(lambda / int(2));
    let s1 = |n: usize| vec![ChainStep::S1; n];
    let lambda_int = || -> Result<usize> {
        if !lambda.is_integer() || *lambda < int(1) || *lambda > int(k as i64 - 1) {
            return Err(Error::InvalidParameter(format!(
                "λ must be an integer in 1..{} for this identity, got {}",
                k - 1,
                fmt_rational(lambda)
            )));
        }
        Ok(lambda.to_integer().try_into().unwrap())
    };
    // the chains shift exponents by at most about λ²/4 downward; pad the
    // working order so the prefix is long enough either way
    let pad = lambda * lambda / int(4) + int(2);
    let work = trunc + &pad;
    type Start = fn(usize, &Rational, &XArg, usize, &Rational) -> Result<BaileyPair>;
    let (start, steps, prefactor): (Start, Vec<ChainStep>, XSeries) =
        match which {
            1 => (|k, a, x, len, t| pair_even(k, a, x, len, t), s1(k - 2), XSeries::one()),
            2 => {
                let pre = XSeries::monomial(int(1), 0, &rat(k as i64, 4)).truncated(&work).div_binomial(&int(-1), 0, &int(1));
                (|k, a, x, len, t| pair_odd(k, a, x, len, t), s1(k - 2), pre?)
            }
            3 => {
                let l = lambda_int()?;
                let mut steps = vec![ChainStep::Lift];
                if l + 1 == k {
                    steps.extend(s1(k - 2));
                } else {
                    steps.extend(s1(l));
                    steps.push(ChainStep::Reduce);
                    steps.extend(s1(k - l - 2));
                }
                (|_, _, _, len, t| pair_two_q_square(len, t), steps, XSeries::one())
            }
            4 => {
                let l = lambda_int()?;
                let mut steps = vec![ChainStep::Lift];
                if l + 1 == k {
                    steps.extend(s1(k - 2));
                } else {
                    steps.extend(s1(l));
                    steps.push(ChainStep::Reduce);
                    steps.extend(s1(k - l - 2));
                }
                let e = (int(k as i64) + int(2) * lambda) / int(4);
                let pre = XSeries::monomial(int(2), 0, &e).truncated(&work).div_binomial(&int(-1), 0, &int(1))?;
                (|_, _, _, len, t| pair_q_square_plus(len, t), steps, pre)
            }
            _ => return Err(Error::InvalidParameter(format!("identity index must be 1..4, got {which}"))),
        };
    replay(|len| start(k, &half_k, &x, len, &work), steps, &prefactor, trunc, &work)
}

/// Grows the prefix until the limit is covered, then replays `steps`.
fn replay(
    build: impl Fn(usize) -> Result<BaileyPair>,
    steps: Vec<ChainStep>,
    prefactor: &XSeries,
    trunc: &Rational,
    work: &Rational,
) -> Result<ChainReplay> {
    let mut len = 4;
    loop {
        let p = apply_chain(&build(len)?, &steps)?;
        let need = required_length(&p, work);
        if need > p.max_index() {
            len = need + 2;
            continue;
        }
        let pair_check = verify_bailey(&p)?;
        let sides = limit_identity(&p, work)?;
        let sides = LimitSides {
            beta_side: (&sides.beta_side * prefactor).truncated(trunc),
            alpha_side: (&sides.alpha_side * prefactor).truncated(trunc),
        };
        return Ok(ChainReplay { steps, pair_check, sides });
    }
}

/// The x-formal chain for the two parity classes of the `tilde_a(k, a)` sum:
/// the even pair (or the odd pair with prefactor `q^{a/2}/(1-q)`) under `k-2`
/// S1 steps and the limit.
pub fn parity_chain(k: usize, a: &Rational, odd: bool, trunc: &Rational) -> Result<ChainReplay> {
    if k < 2 {
        return Err(Error::InvalidDimension { what: "parity chain", min: 2, got: k });
    }
    let work = trunc + int(1);
    let steps = vec![ChainStep::S1; k - 2];
    let x = XArg::Formal;
    if odd {
        let pre = XSeries::monomial(int(1), 0, &(a / int(2))).truncated(&work).div_binomial(&int(-1), 0, &int(1))?;
        replay(|len| pair_odd(k, a, &x, len, &work), steps, &pre, trunc, &work)
    } else {
        replay(|len| pair_even(k, a, &x, len, &work), steps, &XSeries::one(), trunc, &work)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{theta_sum, ThetaSpec};

    fn t(n: i64) -> Rational {
        int(n)
    }

    #[test]
    fn unit_pair_verifies_and_perturbation_is_caught() {
        for e in [int(0), int(1), rat(1, 2)] {
            let p = BaileyPair::unit(e, 5, t(12)).unwrap();
            assert_eq!(verify_bailey(&p).unwrap(), None);
        }
        let p = BaileyPair::unit(int(0), 5, t(12)).unwrap();
        let bad = p.with_beta(3, &p.beta()[3] + &XSeries::monomial(int(1), 0, &int(4)));
        let m = verify_bailey(&bad).unwrap().unwrap();
        assert_eq!(m.n, 3);
        assert_eq!(m.mismatch.exponent, "4");
    }

    #[test]
    fn builtin_pairs_verify() {
        let tr = t(20);
        let x = XArg::Formal;
        for p in [
            pair_even(3, &int(2), &x, 6, &tr).unwrap(),
            pair_odd(3, &int(2), &x, 6, &tr).unwrap(),
            pair_two_q_square(6, &tr).unwrap(),
            pair_q_square_plus(6, &tr).unwrap(),
            random_pair(7, rat(3, 2), 5, &tr).unwrap(),
        ] {
            assert_eq!(verify_bailey(&p).unwrap(), None);
        }
    }

    #[test]
    fn transforms_preserve_the_relation() {
        let tr = t(18);
        for seed in 0..4 {
            let p = random_pair(seed, int(1), 5, &tr).unwrap();
            assert_eq!(verify_bailey(&s1_transform(&p)).unwrap(), None);
            let l = lift_param(&p).unwrap();
            assert_eq!(l.param_exp(), &int(2));
            assert_eq!(verify_bailey(&l).unwrap(), None);
            let r = reduce_param(&p).unwrap();
            assert_eq!(verify_bailey(&r).unwrap(), None);
            assert_eq!(r.beta().len(), p.beta().len());
            for (a, b) in r.beta().iter().zip(p.beta()) {
                assert_eq!(a.render(), b.render());
            }
        }
    }

    #[test]
    fn lift_matches_closed_form() {
        let tr = t(20);
        let p = lift_param(&pair_two_q_square(5, &tr).unwrap()).unwrap();
        for n in 0..5i64 {
            // (2n+1)(1-q^{2n+1})q^{n²}/(1-q) = (2n+1)(q^{n²} + ... + q^{n²+2n})
            let want = (0..=2 * n).fold(XSeries::zero(), |s, j| {
                &s + &XSeries::monomial(int(2 * n + 1), 0, &int(n * n + j))
            });
            assert_eq!(p.alpha()[n as usize], want.truncated(&tr));
        }
        let p = lift_param(&pair_q_square_plus(5, &tr).unwrap()).unwrap();
        for n in 0..5i64 {
            let want = (0..=n).fold(XSeries::zero(), |s, j| {
                &s + &XSeries::monomial(int(n + 1), 0, &int(n * n + n + 2 * j))
            });
            assert_eq!(p.alpha()[n as usize], want.truncated(&tr));
        }
    }

    #[test]
    fn singular_parameters() {
        let p = BaileyPair::unit(int(0), 3, t(5)).unwrap();
        assert!(matches!(reduce_param(&p), Err(Error::SingularParameter(_))));
        assert!(matches!(BaileyPair::unit(int(-1), 3, t(5)), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn limit_on_unit_pair_and_length_check() {
        let p = BaileyPair::unit(int(0), 6, t(20)).unwrap();
        let s = limit_identity(&p, &t(20)).unwrap();
        assert_eq!(s.mismatch(), None);
        let short = BaileyPair::unit(int(0), 3, t(20)).unwrap();
        assert!(matches!(limit_identity(&short, &t(20)), Err(Error::InsufficientLength { have: 2, need: 4 })));
    }

    #[test]
    fn even_chain_reproduces_theta() {
        // k = 3, a = 2: (1/(q;q)_∞) Σ q^{4n²} x^{2n}
        let tr = t(16);
        let p = apply_chain(&pair_even(3, &int(2), &XArg::Formal, 4, &tr).unwrap(), &[ChainStep::S1]).unwrap();
        let s = limit_identity(&p, &tr).unwrap();
        assert_eq!(s.mismatch(), None);
        let th = theta_sum(&ThetaSpec::plain(int(4), int(0), int(0)).with_x(2, 0), &tr).unwrap();
        let inv = XSeries::from_q(crate::qseries::partition_series(&tr));
        assert_eq!(s.alpha_side, &th * &inv);
    }

    #[test]
    fn formal_chains_match_parity_classes() {
        use crate::cartan::tilde_a;
        use crate::nahm::{nahm_sum_parity_pair, NahmSpec};
        let tr = t(12);
        let spec = NahmSpec::new(tilde_a(3, &int(2)).unwrap()).unwrap().with_xweight(vec![0, 1, -1]).unwrap();
        let (even, odd) = nahm_sum_parity_pair(&spec, 2, 3, &tr).unwrap();
        let e = parity_chain(3, &int(2), false, &tr).unwrap();
        let o = parity_chain(3, &int(2), true, &tr).unwrap();
        assert_eq!(e.sides.mismatch(), None);
        assert_eq!(o.sides.mismatch(), None);
        assert_eq!(e.sides.beta_side, even);
        assert_eq!(o.sides.beta_side, odd);
    }

    #[test]
    fn chain_parsing() {
        assert_eq!(
            parse_chain("s1, lift,REDUCE").unwrap(),
            vec![ChainStep::S1, ChainStep::Lift, ChainStep::Reduce]
        );
        assert!(parse_chain("s2").is_err());
        assert!(parse_chain("").unwrap().is_empty());
    }

    #[test]
    fn proof_chains_small() {
        for which in 1..=4u8 {
            for l in [1i64, 2] {
                let r = proof_chain(which, 3, &int(l), &t(10)).unwrap();
                assert_eq!(r.pair_check, None, "which={which} l={l}");
                assert_eq!(r.sides.mismatch(), None, "which={which} l={l}");
            }
        }
    }
}
