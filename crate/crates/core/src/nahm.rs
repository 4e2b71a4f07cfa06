//! Nahm sums `Σ_{n∈N^k} q^{½nᵀAn + Bᵀn + C} x^{wᵀn} / ((q;q)_{n_1}···(q;q)_{n_k})`.
//!
//! Points are enumerated by completing the square with the exact LDLᵀ of `A`:
//! with `c = -A⁻¹B`,
//!
//! ```text
//! ½nᵀAn + Bᵀn + C = C - ½BᵀA⁻¹B + ½ Σ_j d_j (n_j - c_j + Σ_{i>j} L_ij (n_i - c_i))²
//! ```
//!
//! so the points with exponent below the truncation order are exactly the
//! lattice points of an ellipsoid, visited coordinate by coordinate from the
//! last one down with exact integer intervals at every level. The product
//! `Π 1/(q;q)_{n_i}` is carried along the descent and updated in place, one
//! factor `1/(1-q^n)` per step.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedSub, One, Signed, Zero};
use rayon::prelude::*;

use crate::cartan::{tilde_a, Ldlt, RationalMatrix};
use crate::error::{Error, Result};
use crate::qseries::{
    apply_unit_factor, partition_series, pochhammer_finite_inverse, theta_sum, Comparison, FactorSpec, QSeries,
    ThetaSpec, XSeries,
};
use crate::rational::{ceil_i64, denom_i64, floor_i64, int, lcm_i64, open_interval_around, to_grid, Rational};

/// `n_i ≡ n_j + r (mod 2)`, indices 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Parity {
    pub i: usize,
    pub j: usize,
    pub r: u8,
}

/// One side of a Nahm-sum identity.
#[derive(Clone, Debug)]
pub struct NahmSpec {
    a: RationalMatrix,
    b: Vec<Rational>,
    c: Rational,
    parity: Option<Parity>,
    xweight: Vec<i64>,
    base_power: u32,
    ldlt: Ldlt,
}

impl PartialEq for NahmSpec {
    fn eq(&self, o: &NahmSpec) -> bool {
        self.a == o.a
            && self.b == o.b
            && self.c == o.c
            && self.parity == o.parity
            && self.xweight == o.xweight
            && self.base_power == o.base_power
    }
}

impl NahmSpec {
    /// `B = 0`, `C = 0`, no x-weight; rejects matrices that are not positive definite.
    pub fn new(a: RationalMatrix) -> Result<NahmSpec> {
        let ldlt = a.check_positive_definite()?;
        let k = a.dim();
        Ok(NahmSpec {
            a,
            b: vec![Rational::zero(); k],
            c: Rational::zero(),
            parity: None,
            xweight: vec![0; k],
            base_power: 1,
            ldlt,
        })
    }

    fn check_len(&self, what: &str, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "{what} has length {got} but the matrix has dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn with_b(mut self, b: Vec<Rational>) -> Result<NahmSpec> {
        self.check_len("B", b.len())?;
        self.b = b;
        Ok(self)
    }

    pub fn with_c(mut self, c: Rational) -> NahmSpec {
        self.c = c;
        self
    }

    pub fn with_xweight(mut self, w: Vec<i64>) -> Result<NahmSpec> {
        self.check_len("xweight", w.len())?;
        self.xweight = w;
        Ok(self)
    }

    pub fn with_parity(mut self, i: usize, j: usize, r: u8) -> Result<NahmSpec> {
        let k = self.dim();
        if i == j || i == 0 || j == 0 || i > k || j > k {
            return Err(Error::InvalidParameter(format!(
                "parity indices ({i}, {j}) must be distinct and within 1..{k}"
            )));
        }
        self.parity = Some(Parity { i, j, r: r % 2 });
        Ok(self)
    }

    pub fn without_parity(mut self) -> NahmSpec {
        self.parity = None;
        self
    }

    /// Evaluate in `q^m`.
    pub fn with_base_power(mut self, m: u32) -> Result<NahmSpec> {
        if m == 0 {
            return Err(Error::InvalidParameter("base power must be positive".into()));
        }
        self.base_power = m;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn xweight(&self) -> &[i64] {
        &self.xweight
    }

    pub fn base_power(&self) -> u32 {
        self.base_power
    }

    /// LDLᵀ pivots of `A`, all positive.
    pub fn pivots(&self) -> &[Rational] {
        &self.ldlt.pivots
    }

    /// `½nᵀAn + Bᵀn + C` (in the base variable, before `q ↦ q^m`).
    pub fn exponent(&self, n: &[i64]) -> Rational {
        let lin: Rational = self.b.iter().zip(n).map(|(b, &x)| b * int(x)).sum();
        self.a.quad_form(n) / int(2) + lin + &self.c
    }

    pub fn x_degree(&self, n: &[i64]) -> i64 {
        self.xweight.iter().zip(n).map(|(w, x)| w * x).sum()
    }

    /// Smallest value of the exponent over real `n`: `C - ½BᵀA⁻¹B`.
    pub fn exponent_floor(&self) -> Rational {
        let c = self.ldlt.solve(&self.b).expect("positive definite");
        let bab: Rational = self.b.iter().zip(&c).map(|(x, y)| x * y).sum();
        &self.c - bab / int(2)
    }
}

/// Coefficient ring for the accumulators: `i128` first, `BigInt` on overflow.
trait Coef: Clone + Zero + One + CheckedAdd + CheckedSub + Send + Sync {
    fn to_big(&self) -> BigInt;
}

impl Coef for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Coef for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Split {
    None,
    Filter(Parity),
    Pair(usize, usize),
}

/// Dense accumulators keyed by (parity class, x-degree), indexed by grid units above `low`.
struct Acc<T> {
    size: usize,
    slots: HashMap<(u8, i64), Vec<T>>,
}

impl<T: Coef> Acc<T> {
    fn new(size: usize) -> Acc<T> {
        Acc { size, slots: HashMap::new() }
    }

    fn add(&mut self, key: (u8, i64), base: usize, stride: usize, vals: &[T]) -> Option<()> {
        let size = self.size;
        let slot = self.slots.entry(key).or_insert_with(|| vec![T::zero(); size]);
        for (j, v) in vals.iter().enumerate() {
            let pos = base + j * stride;
            if pos >= size {
                break;
            }
            if !v.is_zero() {
                slot[pos] = slot[pos].checked_add(v)?;
            }
        }
        Some(())
    }

    fn merge(mut self, other: Acc<T>) -> Option<Acc<T>> {
        for (key, v) in other.slots {
            match self.slots.get_mut(&key) {
                Some(mine) => {
                    for (a, b) in mine.iter_mut().zip(&v) {
                        *a = a.checked_add(b)?;
                    }
                }
                None => {
                    self.slots.insert(key, v);
                }
            }
        }
        Some(self)
    }
}

/// Precomputed data for one enumeration.
struct Plan<'a> {
    spec: &'a NahmSpec,
    k: usize,
    split: Split,
    /// Grid: exponents are integers over `grid`.
    grid: i64,
    /// `grid · trunc`, rounded up.
    top: i64,
    /// `floor(grid · (C - ½BᵀA⁻¹B))`.
    low: i64,
    trunc: Rational,
    /// `trunc - (C - ½BᵀA⁻¹B)`.
    budget: Rational,
    floor: Rational,
    center: Vec<Rational>,
    quad_diag: Vec<i64>,
    quad_off: Vec<Vec<i64>>,
    lin: Vec<i64>,
    c0: i64,
}

fn exact_units(r: &Rational, grid: i64) -> i64 {
    to_grid(r, grid).expect("grid covers every denominator")
}

impl<'a> Plan<'a> {
    fn new(spec: &'a NahmSpec, split: Split, trunc: &Rational) -> Plan<'a> {
        let k = spec.dim();
        let a = &spec.a;
        let half = Rational::new(1.into(), 2.into());
        let mut grid = denom_i64(&spec.c);
        for i in 0..k {
            grid = lcm_i64(grid, denom_i64(&(a.get(i, i) * &half)));
            grid = lcm_i64(grid, denom_i64(&spec.b[i]));
            for j in i + 1..k {
                grid = lcm_i64(grid, denom_i64(a.get(i, j)));
            }
        }
        let floor = spec.exponent_floor();
        let center: Vec<Rational> = spec.ldlt.solve(&spec.b).expect("positive definite").into_iter().map(|x| -x).collect();
        let quad_diag = (0..k).map(|i| exact_units(&(a.get(i, i) * &half), grid)).collect();
        let quad_off = (0..k)
            .map(|i| (0..k).map(|j| if j > i { exact_units(a.get(i, j), grid) } else { 0 }).collect())
            .collect();
        let lin = spec.b.iter().map(|b| exact_units(b, grid)).collect();
        Plan {
            spec,
            k,
            split,
            grid,
            top: ceil_i64(&(trunc * int(grid))),
            low: floor_i64(&(&floor * int(grid))),
            trunc: trunc.clone(),
            budget: trunc - &floor,
            floor,
            center,
            quad_diag,
            quad_off,
            lin,
            c0: exact_units(&spec.c, grid),
        }
    }

    fn units(&self, n: &[i64]) -> i64 {
        let mut q = self.c0;
        for i in 0..self.k {
            if n[i] == 0 {
                continue;
            }
            q += self.quad_diag[i] * n[i] * n[i] + self.lin[i] * n[i];
            for j in i + 1..self.k {
                q += self.quad_off[i][j] * n[i] * n[j];
            }
        }
        q
    }

    /// Integer range for coordinate `j` given the coordinates above it, plus its center.
    fn interval(&self, j: usize, n: &[i64], used: &Rational) -> Option<(i64, i64, Rational)> {
        let rest = &self.budget - used;
        if !rest.is_positive() {
            return None;
        }
        let l = &self.spec.ldlt.l;
        let mut center = self.center[j].clone();
        for i in j + 1..self.k {
            let lij = l.get(i, j);
            if !lij.is_zero() {
                center -= lij * (int(n[i]) - &self.center[i]);
            }
        }
        let radius_sq = rest * int(2) / &self.spec.ldlt.pivots[j];
        let (lo, hi) = open_interval_around(&center, &radius_sq)?;
        let lo = lo.max(0);
        (lo <= hi).then_some((lo, hi, center))
    }

    fn step_used(&self, j: usize, used: &Rational, nj: i64, center: &Rational) -> Rational {
        let d = int(nj) - center;
        used + &self.spec.ldlt.pivots[j] * &d * &d / int(2)
    }

    /// Series length (in whole powers of q) still needed below a node.
    fn remaining_len(&self, used: &Rational) -> usize {
        ceil_i64(&(&self.trunc - &self.floor - used)).max(0) as usize
    }

    fn leaf<T: Coef>(&self, n: &[i64], prod: &[T], acc: &mut Acc<T>) -> Option<()> {
        let class = match self.split {
            Split::None => 0,
            Split::Filter(p) => {
                if (n[p.i - 1] - n[p.j - 1] - p.r as i64).rem_euclid(2) != 0 {
                    return Some(());
                }
                0
            }
            Split::Pair(i, j) => ((n[i - 1] - n[j - 1]).rem_euclid(2)) as u8,
        };
        let q = self.units(n);
        if q >= self.top {
            return Some(());
        }
        let len = Integer::div_ceil(&(self.top - q), &self.grid) as usize;
        let x = self.spec.x_degree(n);
        acc.add((class, x), (q - self.low) as usize, self.grid as usize, &prod[..len.min(prod.len())])
    }

    fn level<T: Coef>(&self, j: usize, n: &mut [i64], used: &Rational, prod: &[T], acc: &mut Acc<T>) -> Option<()> {
        let Some((lo, hi, center)) = self.interval(j, n, used) else {
            return Some(());
        };
        let mut cur = prod.to_vec();
        for s in 1..=lo {
            apply_unit_factor(&mut cur, s as usize, -1)?;
        }
        for v in lo..=hi {
            if v > lo {
                apply_unit_factor(&mut cur, v as usize, -1)?;
            }
            n[j] = v;
            let u = self.step_used(j, used, v, &center);
            if j == 0 {
                self.leaf(n, &cur, acc)?;
            } else {
                let len = self.remaining_len(&u).min(cur.len());
                self.level(j - 1, n, &u, &cur[..len], acc)?;
            }
        }
        n[j] = 0;
        Some(())
    }

    fn run<T: Coef>(&self) -> Option<Acc<T>> {
        let size = (self.top - self.low).max(0) as usize;
        let top = self.k - 1;
        let zero = vec![0i64; self.k];
        let Some((lo, hi, center)) = self.interval(top, &zero, &Rational::zero()) else {
            return Some(Acc::new(size));
        };
        let len = self.remaining_len(&Rational::zero());
        (lo..=hi)
            .into_par_iter()
            .map(|v| {
                let mut acc = Acc::new(size);
                let mut cur = vec![T::zero(); len];
                if len > 0 {
                    cur[0] = T::one();
                }
                for s in 1..=v {
                    apply_unit_factor(&mut cur, s as usize, -1)?;
                }
                let mut n = zero.clone();
                n[top] = v;
                let u = self.step_used(top, &Rational::zero(), v, &center);
                if top == 0 {
                    self.leaf(&n, &cur, &mut acc)?;
                } else {
                    let l = self.remaining_len(&u).min(cur.len());
                    self.level(top - 1, &mut n, &u, &cur[..l], &mut acc)?;
                }
                Some(acc)
            })
            .try_reduce(|| Acc::new(size), |a, b| a.merge(b))
    }

    fn collect<T: Coef>(&self, acc: Acc<T>, class: u8) -> XSeries {
        let members = acc.slots.into_iter().filter(|((c, _), _)| *c == class).map(|((_, x), v)| {
            let coeffs = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 + self.low, Rational::from_integer(c.to_big())))
                .collect();
            (x, QSeries::from_units(self.grid, Some(self.top), coeffs))
        });
        XSeries::from_members(members, Some(&self.trunc))
    }

    fn evaluate(&self, classes: &[u8]) -> Vec<XSeries> {
        match self.run::<i128>() {
            Some(acc) => {
                let mut out = Vec::new();
                let mut acc = Some(acc);
                for (idx, &c) in classes.iter().enumerate() {
                    let a = if idx + 1 == classes.len() { acc.take().unwrap() } else { acc.as_ref().map(clone_acc).unwrap() };
                    out.push(self.collect(a, c));
                }
                out
            }
            None => {
                let acc = self.run::<BigInt>().expect("bigint arithmetic cannot overflow");
                classes.iter().map(|&c| self.collect(clone_acc(&acc), c)).collect()
            }
        }
    }
}

fn clone_acc<T: Coef>(a: &Acc<T>) -> Acc<T> {
    Acc { size: a.size, slots: a.slots.clone() }
}

fn base_trunc(spec: &NahmSpec, trunc: &Rational) -> Rational {
    trunc / int(spec.base_power as i64)
}

fn finish(spec: &NahmSpec, s: XSeries) -> XSeries {
    if spec.base_power == 1 {
        s
    } else {
        s.substitute_power(spec.base_power as i64)
    }
}

/// Exact expansion of the Nahm sum below `trunc` (in the variable after `q ↦ q^m`).
pub fn nahm_sum(spec: &NahmSpec, trunc: &Rational) -> XSeries {
    let split = match spec.parity {
        Some(p) => Split::Filter(p),
        None => Split::None,
    };
    let t = base_trunc(spec, trunc);
    let plan = Plan::new(spec, split, &t);
    let s = plan.evaluate(&[0]).pop().unwrap();
    finish(spec, s)
}

/// The sum split by the parity of `n_i - n_j` (1-based): `(even, odd)`.
pub fn nahm_sum_parity_pair(spec: &NahmSpec, i: usize, j: usize, trunc: &Rational) -> Result<(XSeries, XSeries)> {
    if spec.parity.is_some() {
        return Err(Error::InvalidParameter("parity pair needs a spec without a parity constraint".into()));
    }
    let k = spec.dim();
    if i == j || i == 0 || j == 0 || i > k || j > k {
        return Err(Error::InvalidParameter(format!(
            "parity indices ({i}, {j}) must be distinct and within 1..{k}"
        )));
    }
    let t = base_trunc(spec, trunc);
    let plan = Plan::new(spec, Split::Pair(i, j), &t);
    let mut v = plan.evaluate(&[0, 1]);
    let odd = finish(spec, v.pop().unwrap());
    let even = finish(spec, v.pop().unwrap());
    Ok((even, odd))
}

/// Sum over `n ∈ N^k` with `wᵀn ≤ x_cap`, for positive weights `w` and a
/// matrix that need only be positive semidefinite. The result is exact in
/// every x-degree up to `x_cap` and says nothing above it.
pub fn capped_sum(
    a: &RationalMatrix,
    b: &[Rational],
    c: &Rational,
    w: &[i64],
    x_cap: i64,
    trunc: &Rational,
) -> Result<XSeries> {
    let k = a.dim();
    if b.len() != k || w.len() != k {
        return Err(Error::InvalidParameter("B and xweight must match the matrix dimension".into()));
    }
    if w.iter().any(|&x| x <= 0) {
        return Err(Error::InvalidParameter("capped sums need positive x-weights".into()));
    }
    let f = a.ldlt()?;
    if f.pivots.iter().any(|p| p.is_negative()) {
        return Err(Error::NotPositiveDefinite { index: 0, pivot: "negative".into() });
    }
    let mut members: Vec<(i64, QSeries)> = Vec::new();
    let mut n = vec![0i64; k];
    fn rec(
        i: usize,
        left: i64,
        n: &mut Vec<i64>,
        ctx: (&RationalMatrix, &[Rational], &Rational, &[i64], &Rational),
        out: &mut Vec<(i64, QSeries)>,
    ) {
        let (a, b, c, w, t) = ctx;
        if i == n.len() {
            let lin: Rational = b.iter().zip(n.iter()).map(|(x, &v)| x * int(v)).sum();
            let e = a.quad_form(n) / int(2) + lin + c;
            if &e >= t {
                return;
            }
            let len = ceil_i64(&(t - &e)).max(0) as usize;
            let mut v = vec![BigInt::zero(); len];
            if len > 0 {
                v[0] = BigInt::one();
            }
            for &ni in n.iter() {
                for s in 1..=ni {
                    apply_unit_factor(&mut v, s as usize, -1).expect("bigint");
                }
            }
            let xd: i64 = w.iter().zip(n.iter()).map(|(p, q)| p * q).sum();
            let s = QSeries::from_terms(
                v.into_iter().enumerate().map(|(j, c)| (&e + int(j as i64), Rational::from_integer(c))),
                Some(t),
            );
            out.push((xd, s));
            return;
        }
        let mut v = 0;
        while v * w[i] <= left {
            n[i] = v;
            rec(i + 1, left - v * w[i], n, ctx, out);
            v += 1;
        }
        n[i] = 0;
    }
    rec(0, x_cap, &mut n, (a, b, c, w, trunc), &mut members);
    Ok(XSeries::from_members(members, Some(trunc)))
}

/// `1/(q;q)_n` below `trunc`.
pub fn inv_qq(n: usize, trunc: &Rational) -> QSeries {
    pochhammer_finite_inverse(&FactorSpec::q(int(1), int(1)), n, trunc)
        .expect("(q;q)_n is invertible")
        .slice(0)
}

/// `Σ_{n_1-n_2=n} q^{n_1 n_2}/((q;q)_{n_1}(q;q)_{n_2})` against `1/(q;q)_∞`.
pub fn verify_durfee(n: i64, trunc: &Rational) -> Comparison {
    let mut lhs = QSeries::zero().truncated(trunc);
    let mut n2: i64 = (-n).max(0);
    loop {
        let n1 = n2 + n;
        let e = int(n1 * n2);
        if &e >= trunc {
            break;
        }
        let t = trunc - &e;
        let term = (&inv_qq(n1 as usize, &t) * &inv_qq(n2 as usize, &t)).shift(&e);
        lhs = &lhs + &term;
        n2 += 1;
    }
    Comparison::new(XSeries::from_q(lhs), XSeries::from_q(partition_series(trunc)))
}

/// `1/((q;q)_i (q;q)_j) = Σ_ℓ q^{(i-ℓ)(j-ℓ)}/((q;q)_ℓ (q;q)_{i-ℓ} (q;q)_{j-ℓ})` for all
/// `i ≤ i_max`, `j ≤ j_max`. Returns one comparison per `(i, j)`.
pub fn verify_lift_identity(i_max: usize, j_max: usize, trunc: &Rational) -> Vec<((usize, usize), Comparison)> {
    let mut out = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            let lhs = &inv_qq(i, trunc) * &inv_qq(j, trunc);
            let mut rhs = QSeries::zero().truncated(trunc);
            for l in 0..=i.min(j) {
                let e = int(((i - l) * (j - l)) as i64);
                if &e >= trunc {
                    continue;
                }
                let t = trunc - &e;
                let term = &(&inv_qq(l, &t) * &inv_qq(i - l, &t)) * &inv_qq(j - l, &t);
                rhs = &rhs + &term.shift(&e);
            }
            out.push(((i, j), Comparison::new(XSeries::from_q(lhs), XSeries::from_q(rhs))));
        }
    }
    out
}

/// `F_k`: the sum on `tilde_a(k, a)` with its last two coordinates moved to
/// the front and weight `x^{n_1 - n_2}`.
pub fn fk_spec(k: usize, a: &Rational) -> Result<NahmSpec> {
    let m = tilde_a(k, a)?;
    let mut perm = vec![k - 2, k - 1];
    perm.extend(0..k - 2);
    let mut w = vec![0; k];
    w[0] = 1;
    w[1] = -1;
    NahmSpec::new(m.permuted(&perm))?.with_xweight(w)
}

/// `F_k = F_{k+1}` below `trunc`.
pub fn verify_fk_recursion(k: usize, a: &Rational, trunc: &Rational) -> Result<Comparison> {
    if k < 2 {
        return Err(Error::InvalidDimension { what: "F_k recursion", min: 2, got: k });
    }
    let f = nahm_sum(&fk_spec(k, a)?, trunc);
    let g = nahm_sum(&fk_spec(k + 1, a)?, trunc);
    Ok(Comparison::new(f, g))
}

/// `F_2 = (1/(q;q)_∞)·Σ_n q^{an²/2} x^n`.
pub fn verify_f2_durfee(a: &Rational, trunc: &Rational) -> Result<Comparison> {
    let f = nahm_sum(&fk_spec(2, a)?, trunc);
    let theta = theta_sum(&ThetaSpec::plain(a / int(2), int(0), int(0)).with_x(1, 0), trunc)?;
    Ok(Comparison::new(f, &theta * &XSeries::from_q(partition_series(trunc))))
}

/// Brute-force grid size: every `n` with some `n_i > bound` has exponent at least
/// `trunc`, using `½nᵀAn ≥ ½λ n_i²` with `λ` a rational lower bound on the
/// smallest eigenvalue. Used by tests as an independent oracle.
pub fn box_bound(spec: &NahmSpec, trunc: &Rational) -> i64 {
    // λ_min(A) ≥ 1 / trace(A⁻¹)
    let inv = spec.a.inverse().expect("positive definite");
    let tr: Rational = (0..spec.dim()).map(|i| inv.get(i, i).clone()).sum();
    let lam = tr.recip();
    let bmin = spec.b.iter().cloned().fold(Rational::zero(), |m, x| if x < m { x } else { m });
    // ½λn² + bmin·k·n + C ≥ trunc beyond the bound
    let mut n: i64 = 0;
    loop {
        let v = &lam * int(n * n) / int(2) + &bmin * int(spec.dim() as i64 * n) + &spec.c;
        if n > 0 && v >= *trunc && (&lam * int(n) + &bmin * int(spec.dim() as i64)).is_positive() {
            return n;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::matrix_2dinv;
    use crate::rational::rat;

    fn one_by_one(a: i64, b: i64) -> NahmSpec {
        let m = RationalMatrix::from_rows(vec![vec![int(a)]]).unwrap();
        NahmSpec::new(m).unwrap().with_b(vec![int(b)]).unwrap()
    }

    fn q(cs: &[i64], t: i64) -> XSeries {
        XSeries::from_q(QSeries::from_ints(cs, Some(t)))
    }

    #[test]
    fn rogers_ramanujan_low_order() {
        assert_eq!(nahm_sum(&one_by_one(2, 0), &int(5)), q(&[1, 1, 1, 1, 2], 5));
        assert_eq!(nahm_sum(&one_by_one(2, 1), &int(5)), q(&[1, 0, 1, 1, 1], 5));
    }

    #[test]
    fn empty_budget_and_constant_term() {
        let s = one_by_one(2, 0).with_c(int(3));
        let out = nahm_sum(&s, &int(2));
        assert!(out.is_zero());
        assert_eq!(out.trunc(), Some(int(2)));
        let out = nahm_sum(&s, &int(4));
        assert_eq!(out.coeff(0, &int(3)), Some(int(1)));
    }

    #[test]
    fn rejects_indefinite() {
        let m = RationalMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(1)]]).unwrap();
        assert!(matches!(NahmSpec::new(m), Err(Error::NotPositiveDefinite { index: 2, .. })));
    }

    #[test]
    fn parity_pair_adds_up() {
        let s = NahmSpec::new(tilde_a(2, &int(2)).unwrap()).unwrap().with_xweight(vec![1, -1]).unwrap();
        let t = int(6);
        let (e, o) = nahm_sum_parity_pair(&s, 1, 2, &t).unwrap();
        assert_eq!(&e + &o, nahm_sum(&s, &t));
        assert!(e.x_degrees().all(|d| d % 2 == 0));
        assert!(o.x_degrees().all(|d| d % 2 != 0));
        let filtered = nahm_sum(&s.clone().with_parity(1, 2, 1).unwrap(), &t);
        assert_eq!(filtered, o);
    }

    #[test]
    fn base_power_substitutes() {
        let s = one_by_one(2, 0).with_base_power(2).unwrap();
        let out = nahm_sum(&s, &int(10));
        assert_eq!(out, q(&[1, 0, 1, 0, 1, 0, 1, 0, 2, 0], 10));
    }

    #[test]
    fn negative_linear_term() {
        // q^{n² - 2n}: minimum at n = 1
        let s = one_by_one(2, -2);
        let out = nahm_sum(&s, &int(2));
        // n=0: 1/(q)_0 = 1; n=1: q^{-1}/(1-q); n=2: 1/(q)_2; n=3: q^3...
        let want = XSeries::from_q(QSeries::from_terms(
            [(int(-1), int(1)), (int(0), int(3)), (int(1), int(2))],
            Some(&int(2)),
        ));
        assert_eq!(out, want);
    }

    #[test]
    fn durfee_and_lift() {
        let p = verify_durfee(0, &int(6));
        assert!(p.matches());
        assert_eq!(p.lhs.slice(0), QSeries::from_ints(&[1, 1, 2, 3, 5, 7], Some(6)));
        assert_eq!(verify_durfee(3, &int(12)).lhs, verify_durfee(-3, &int(12)).lhs);
        assert!(verify_lift_identity(2, 2, &int(12)).iter().all(|(_, c)| c.matches()));
    }

    #[test]
    fn fk_small() {
        assert!(verify_fk_recursion(2, &int(2), &int(8)).unwrap().matches());
        assert!(verify_f2_durfee(&rat(13, 8), &int(8)).unwrap().matches());
    }

    #[test]
    fn half_integral_grid() {
        let s = NahmSpec::new(matrix_2dinv(3).unwrap()).unwrap();
        let out = nahm_sum(&s, &int(3));
        assert_eq!(out.coeff(0, &rat(3, 4)), Some(int(2)));
        assert_eq!(out.coeff(0, &int(1)), Some(int(1)));
    }
}
