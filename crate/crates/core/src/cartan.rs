//! Exact symmetric matrices: the Cartan-type constructors, LDLᵀ and the
//! positivity checks built on it.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};

/// Dense square matrix with rational entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> RationalMatrix {
        RationalMatrix { n, entries: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// From rows; every row must have the same length as the row count.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<RationalMatrix> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidDimension { what: "matrix", min: 1, got: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "matrix must be square: {} rows but a row of length {}",
                n,
                bad.len()
            )));
        }
        Ok(RationalMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Rational) -> RationalMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Rational) -> RationalMatrix {
        RationalMatrix { n: self.n, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        RationalMatrix::from_fn(n, |i, j| {
            let mut s = Rational::zero();
            for k in 0..n {
                let a = self.get(i, k);
                if !a.is_zero() {
                    s += a * other.get(k, j);
                }
            }
            s
        })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    /// `nᵀ M n` for an integer vector.
    pub fn quad_form(&self, v: &[i64]) -> Rational {
        let mut s = Rational::zero();
        for i in 0..self.n {
            if v[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if v[j] != 0 {
                    s += self.get(i, j) * int(v[i] * v[j]);
                }
            }
        }
        s
    }

    /// `P M Pᵀ` where row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> RationalMatrix {
        assert_eq!(perm.len(), self.n);
        RationalMatrix::from_fn(self.n, |i, j| self.get(perm[i], perm[j]).clone())
    }

    /// Square block with rows and columns `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> RationalMatrix {
        RationalMatrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    pub fn ldlt(&self) -> Result<Ldlt> {
        ldlt(self)
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        inverse(self)
    }

    /// Errors with the first non-positive pivot unless the matrix is positive definite.
    pub fn check_positive_definite(&self) -> Result<Ldlt> {
        let f = match ldlt(self) {
            Ok(f) => f,
            Err(Error::FactorizationFailure { index }) => {
                return Err(Error::NotPositiveDefinite { index: index + 1, pivot: "0".into() })
            }
            Err(e) => return Err(e),
        };
        if let Some(i) = f.pivots.iter().position(|p| !p.is_positive()) {
            return Err(Error::NotPositiveDefinite { index: i + 1, pivot: fmt_rational(&f.pivots[i]) });
        }
        Ok(f)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.check_positive_definite().is_ok()
    }

    /// DSL row-literal form, `[[2, 1], [1, 3/2]]`.
    pub fn to_literal(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| format!("[{}]", r.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// `M = L·diag(pivots)·Lᵀ` with unit lower-triangular `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ldlt {
    pub l: RationalMatrix,
    pub pivots: Vec<Rational>,
}

impl Ldlt {
    pub fn is_positive_definite(&self) -> bool {
        self.pivots.iter().all(|p| p.is_positive())
    }

    /// Rebuilds `L·D·Lᵀ`.
    pub fn reconstruct(&self) -> RationalMatrix {
        let n = self.l.dim();
        RationalMatrix::from_fn(n, |i, j| {
            (0..=i.min(j)).map(|k| self.l.get(i, k) * &self.pivots[k] * self.l.get(j, k)).sum()
        })
    }

    /// Solves `M x = b`; fails on a zero pivot.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.l.dim();
        if self.pivots.iter().any(|p| p.is_zero()) {
            return Err(Error::Singular);
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.l.get(i, k) * &y[k];
                y[i] -= t;
            }
        }
        for i in 0..n {
            y[i] = &y[i] / &self.pivots[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.l.get(k, i) * &y[k];
                y[i] -= t;
            }
        }
        Ok(y)
    }
}

/// Exact LDLᵀ of a symmetric matrix.
///
/// A zero pivot is accepted only when the rest of its column vanishes
/// (the semidefinite case); otherwise the matrix is indefinite in a way
/// this factorization cannot express.
pub fn ldlt(m: &RationalMatrix) -> Result<Ldlt> {
    if !m.is_symmetric() {
        return Err(Error::InvalidParameter("LDL^T needs a symmetric matrix".into()));
    }
    let n = m.dim();
    let mut l = RationalMatrix::identity(n);
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = m.get(j, j).clone();
        for k in 0..j {
            let ljk = l.get(j, k);
            if !ljk.is_zero() {
                dj -= ljk * ljk * &d[k];
            }
        }
        for i in j + 1..n {
            let mut s = m.get(i, j).clone();
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k) * &d[k];
            }
            if dj.is_zero() {
                if !s.is_zero() {
                    return Err(Error::FactorizationFailure { index: j });
                }
                l.set(i, j, Rational::zero());
            } else {
                l.set(i, j, s / &dj);
            }
        }
        d.push(dj);
    }
    Ok(Ldlt { l, pivots: d })
}

/// Inverse of a symmetric matrix by LDLᵀ back-substitution.
pub fn inverse(m: &RationalMatrix) -> Result<RationalMatrix> {
    let f = ldlt(m).map_err(|e| match e {
        Error::FactorizationFailure { .. } => Error::Singular,
        e => e,
    })?;
    let n = m.dim();
    let mut out = RationalMatrix::zeros(n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        let col = f.solve(&e)?;
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

fn need_dim(what: &'static str, min: usize, got: usize) -> Result<()> {
    if got < min {
        Err(Error::InvalidDimension { what, min, got })
    } else {
        Ok(())
    }
}

/// `G_k = (min(i, j))`.
pub fn matrix_g(k: usize) -> Result<RationalMatrix> {
    need_dim("G(k)", 1, k)?;
    Ok(RationalMatrix::from_fn(k, |i, j| int(i.min(j) as i64 + 1)))
}

/// Tadpole Cartan matrix `C(T_k)`: tridiagonal, corner entry 1.
pub fn matrix_t(k: usize) -> Result<RationalMatrix> {
    need_dim("T(k)", 1, k)?;
    Ok(RationalMatrix::from_fn(k, |i, j| {
        if i == j {
            int(if i + 1 == k { 1 } else { 2 })
        } else if i.abs_diff(j) == 1 {
            int(-1)
        } else {
            int(0)
        }
    }))
}

/// Cartan matrix of `D_k`: a chain on nodes `1..k-1` with node `k` forked off node `k-2`.
pub fn matrix_d(k: usize) -> Result<RationalMatrix> {
    need_dim("D(k)", 3, k)?;
    let mut m = RationalMatrix::zeros(k);
    for i in 0..k {
        m.set(i, i, int(2));
    }
    for i in 0..k - 2 {
        m.set(i, i + 1, int(-1));
        m.set(i + 1, i, int(-1));
    }
    m.set(k - 3, k - 1, int(-1));
    m.set(k - 1, k - 3, int(-1));
    Ok(m)
}

/// `2·C(D_k)^{-1}` in closed form.
pub fn matrix_2dinv(k: usize) -> Result<RationalMatrix> {
    need_dim("inv2D(k)", 3, k)?;
    tilde_a(k, &Rational::new(k.into(), 2.into()))
}

/// The one-parameter family with corner block `[[a, k-1-a], [k-1-a, a]]`;
/// `a = k/2` gives `2·C(D_k)^{-1}`.
pub fn tilde_a(k: usize, a: &Rational) -> Result<RationalMatrix> {
    need_dim("tildeA(k, a)", 2, k)?;
    let off = int(k as i64 - 1) - a;
    Ok(RationalMatrix::from_fn(k, |i, j| {
        let (ci, cj) = (i + 2 >= k, j + 2 >= k);
        match (ci, cj) {
            (true, true) if i == j => a.clone(),
            (true, true) => off.clone(),
            (true, false) => int(j as i64 + 1),
            (false, true) => int(i as i64 + 1),
            (false, false) => int(2 * (i.min(j) as i64 + 1)),
        }
    }))
}

/// Schur complement of the leading `2G_{k-2}` block in `tilde_a(k, a)`.
pub fn schur_delta(k: usize, a: &Rational) -> Result<RationalMatrix> {
    need_dim("schur_delta(k, a)", 3, k)?;
    let m = tilde_a(k, a)?;
    let head: Vec<usize> = (0..k - 2).collect();
    let g_inv = inverse(&m.submatrix(&head))?;
    let tail = [k - 2, k - 1];
    Ok(RationalMatrix::from_fn(2, |r, c| {
        let mut s = m.get(tail[r], tail[c]).clone();
        for i in 0..k - 2 {
            for j in 0..k - 2 {
                s -= m.get(i, tail[r]) * g_inv.get(i, j) * m.get(j, tail[c]);
            }
        }
        s
    }))
}

/// Dual Nahm data `(A⁻¹, A⁻¹B, ½BᵀA⁻¹B − k/24 − C)`.
pub fn dual_data(
    a: &RationalMatrix,
    b: &[Rational],
    c: &Rational,
) -> Result<(RationalMatrix, Vec<Rational>, Rational)> {
    let ai = inverse(a)?;
    let bs = ai.mul_vec(b);
    let half_bab: Rational = b.iter().zip(&bs).map(|(x, y)| x * y).sum::<Rational>() / int(2);
    let cs = half_bab - Rational::new((a.dim() as i64).into(), 24.into()) - c;
    Ok((ai, bs, cs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn small_constructors() {
        assert_eq!(matrix_g(1).unwrap(), m(&[&[1]]));
        assert_eq!(matrix_g(3).unwrap(), m(&[&[1, 1, 1], &[1, 2, 2], &[1, 2, 3]]));
        assert_eq!(matrix_t(2).unwrap(), m(&[&[2, -1], &[-1, 1]]));
        assert_eq!(matrix_t(1).unwrap(), m(&[&[1]]));
        assert_eq!(matrix_d(3).unwrap(), m(&[&[2, -1, -1], &[-1, 2, 0], &[-1, 0, 2]]));
        assert!(matches!(matrix_d(2), Err(Error::InvalidDimension { .. })));
        assert!(matches!(matrix_g(0), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn closed_form_inverse_k3() {
        let want = RationalMatrix::from_rows(vec![
            vec![int(2), int(1), int(1)],
            vec![int(1), rat(3, 2), rat(1, 2)],
            vec![int(1), rat(1, 2), rat(3, 2)],
        ])
        .unwrap();
        assert_eq!(matrix_2dinv(3).unwrap(), want);
        let t = tilde_a(2, &rat(5, 3)).unwrap();
        assert_eq!(t.get(0, 1), &rat(-2, 3));
    }

    #[test]
    fn d_times_closed_form_is_twice_identity() {
        for k in 3..=10 {
            let p = matrix_d(k).unwrap().mul(&matrix_2dinv(k).unwrap());
            assert_eq!(p, RationalMatrix::identity(k).scale(&int(2)), "k={k}");
        }
    }

    #[test]
    fn the_printed_fork_fails_the_inverse_check() {
        // Attaching node k to node k-3 instead of k-2.
        let k = 5;
        let mut d = RationalMatrix::zeros(k);
        for i in 0..k {
            d.set(i, i, int(2));
        }
        for i in 0..k - 2 {
            d.set(i, i + 1, int(-1));
            d.set(i + 1, i, int(-1));
        }
        d.set(k - 4, k - 1, int(-1));
        d.set(k - 1, k - 4, int(-1));
        assert_ne!(d.mul(&matrix_2dinv(k).unwrap()), RationalMatrix::identity(k).scale(&int(2)));
    }

    #[test]
    fn ldlt_reconstructs_and_inverts() {
        for k in 1..=8 {
            let g = matrix_g(k).unwrap();
            let f = g.ldlt().unwrap();
            assert_eq!(f.reconstruct(), g);
            assert!(f.is_positive_definite());
            assert_eq!(g.inverse().unwrap(), matrix_t(k).unwrap());
        }
        let i = RationalMatrix::identity(3).ldlt().unwrap();
        assert_eq!(i.l, RationalMatrix::identity(3));
        assert_eq!(i.pivots, vec![int(1); 3]);
    }

    #[test]
    fn positivity_boundary() {
        assert!(tilde_a(4, &rat(7, 4)).unwrap().is_positive_definite());
        let err = tilde_a(4, &rat(3, 2)).unwrap().check_positive_definite().unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn semidefinite_and_indefinite() {
        let psd = m(&[&[1, 1], &[1, 1]]);
        let f = psd.ldlt().unwrap();
        assert_eq!(f.pivots, vec![int(1), int(0)]);
        assert!(matches!(psd.inverse(), Err(Error::Singular)));
        let bad = m(&[&[0, 1], &[1, 0]]);
        assert!(matches!(bad.ldlt(), Err(Error::FactorizationFailure { index: 0 })));
        assert!(matches!(bad.check_positive_definite(), Err(Error::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn schur_delta_closed_form() {
        assert_eq!(schur_delta(4, &int(2)).unwrap(), RationalMatrix::identity(2));
        for k in 3..=10usize {
            for a in [rat(1, 3), rat(7, 4), int(k as i64), rat(-5, 2)] {
                let d = schur_delta(k, &a).unwrap();
                let diag = &a - rat(k as i64, 2) + int(1);
                let off = rat(k as i64, 2) - &a;
                assert_eq!(d, RationalMatrix::from_rows(vec![vec![diag.clone(), off.clone()], vec![off, diag]]).unwrap());
            }
        }
    }

    #[test]
    fn dual_is_an_involution() {
        let a = tilde_a(3, &rat(7, 3)).unwrap();
        let b = vec![rat(1, 2), int(0), int(-1)];
        let c = rat(-1, 24);
        let (a1, b1, c1) = dual_data(&a, &b, &c).unwrap();
        let (a2, b2, c2) = dual_data(&a1, &b1, &c1).unwrap();
        assert_eq!((a2, b2, c2), (a, b, c));
    }

    #[test]
    fn literal_form() {
        assert_eq!(matrix_2dinv(3).unwrap().to_literal(), "[[2, 1, 1], [1, 3/2, 1/2], [1, 1/2, 3/2]]");
    }
}
