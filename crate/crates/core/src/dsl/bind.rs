//! Turns parsed items into [`IdentityCase`]s.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use super::ast::*;
use super::{Diagnostic, DiagnosticKind};
use crate::cartan::{matrix_2dinv, matrix_d, matrix_g, matrix_t, tilde_a, RationalMatrix};
use crate::identities::{Factor, IdentityCase, Lhs, RhsExpr, Term};
use crate::nahm::NahmSpec;
use crate::qseries::{FactorSpec, ThetaSpec};
use crate::rational::{fmt_rational, int, Rational};

/// Default order when a file gives none.
pub const DEFAULT_ORDER: i64 = 20;

type BResult<T> = Result<T, Diagnostic>;

struct Ctx {
    env: BTreeMap<String, Rational>,
    pos: Pos,
}

impl Ctx {
    fn diag(&self, kind: DiagnosticKind, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::new(kind, msg, self.pos.line, self.pos.col)
    }

    fn eval(&self, e: &Expr) -> BResult<Rational> {
        Ok(match e {
            Expr::Int(n) => int(*n),
            Expr::Name(s, p) => match self.env.get(s) {
                Some(v) => v.clone(),
                None => {
                    return Err(Diagnostic::new(
                        DiagnosticKind::Semantic,
                        format!("unknown name `{s}`; parameters must be defined before use"),
                        p.line,
                        p.col,
                    ))
                }
            },
            Expr::Neg(x) => -self.eval(x)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(self.diag(DiagnosticKind::Semantic, "division by zero"));
                        }
                        a / b
                    }
                }
            }
        })
    }

    fn eval_int(&self, e: &Expr, what: &str) -> BResult<i64> {
        let v = self.eval(e)?;
        if !v.is_integer() {
            return Err(self.diag(DiagnosticKind::Arity, format!("{what} must be an integer, got {}", fmt_rational(&v))));
        }
        v.to_integer()
            .to_i64()
            .ok_or_else(|| self.diag(DiagnosticKind::Arity, format!("{what} is out of range")))
    }

    fn eval_count(&self, e: &Expr, what: &str) -> BResult<usize> {
        let v = self.eval_int(e, what)?;
        usize::try_from(v).map_err(|_| self.diag(DiagnosticKind::Arity, format!("{what} must be nonnegative, got {v}")))
    }
}

fn expect_exprs<'a>(ctx: &Ctx, name: &str, args: &'a [Arg], counts: &[usize]) -> BResult<Vec<&'a Expr>> {
    if !counts.contains(&args.len()) {
        let want: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
        return Err(ctx.diag(
            DiagnosticKind::Arity,
            format!("`{name}` takes {} argument(s), got {}", want.join(" or "), args.len()),
        ));
    }
    args.iter()
        .map(|a| match a {
            Arg::Expr(e) => Ok(e),
            Arg::List(_) => Err(ctx.diag(DiagnosticKind::Arity, format!("`{name}` does not take a list argument"))),
        })
        .collect()
}

fn bind_matrix(ctx: &Ctx, m: &MatExpr) -> BResult<RationalMatrix> {
    match m {
        MatExpr::Rows(rows) => {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|e| ctx.eval(e)).collect::<BResult<Vec<_>>>())
                .collect::<BResult<Vec<_>>>()?;
            RationalMatrix::from_rows(rows).map_err(|e| ctx.diag(DiagnosticKind::Semantic, e.to_string()))
        }
        MatExpr::Builder { name, args, pos } => {
            let ctx = Ctx { env: ctx.env.clone(), pos: *pos };
            let built = match name.as_str() {
                "inv2D" | "G" | "T" | "D" => {
                    let a = expect_exprs(&ctx, name, args, &[1])?;
                    let k = ctx.eval_count(a[0], "matrix size")?;
                    match name.as_str() {
                        "inv2D" => matrix_2dinv(k),
                        "G" => matrix_g(k),
                        "T" => matrix_t(k),
                        _ => matrix_d(k),
                    }
                }
                "tildeA" => {
                    let a = expect_exprs(&ctx, name, args, &[2])?;
                    let k = ctx.eval_count(a[0], "matrix size")?;
                    tilde_a(k, &ctx.eval(a[1])?)
                }
                other => {
                    return Err(ctx.diag(
                        DiagnosticKind::Arity,
                        format!("unknown matrix builder `{other}`; expected inv2D, tildeA, G, T or D"),
                    ))
                }
            };
            built.map_err(|e| ctx.diag(DiagnosticKind::Arity, e.to_string()))
        }
    }
}

fn bind_factor(env: &BTreeMap<String, Rational>, f: &FactorAst) -> BResult<Factor> {
    let ctx = Ctx { env: env.clone(), pos: f.pos };
    let args = f.args.as_deref().unwrap_or(&[]);
    let no_pow = |what: &str| -> BResult<()> {
        if f.pow.is_some() {
            return Err(ctx.diag(DiagnosticKind::Arity, format!("`{what}` cannot be raised to a power")));
        }
        Ok(())
    };
    let pow = f.pow.unwrap_or(1);
    let pow32 = i32::try_from(pow).map_err(|_| ctx.diag(DiagnosticKind::Arity, "exponent out of range"))?;
    Ok(match f.name.as_str() {
        "J" => {
            let a = expect_exprs(&ctx, "J", args, &[1, 2])?;
            let vals = a.iter().map(|e| ctx.eval_count(e, "J index")).collect::<BResult<Vec<_>>>()?;
            let (a, m) = if vals.len() == 1 { (0, vals[0]) } else { (vals[0], vals[1]) };
            if m == 0 || (vals.len() == 2 && (a == 0 || a >= m)) {
                return Err(ctx.diag(DiagnosticKind::Arity, "J(a, m) needs 0 < a < m, and J(m) needs m > 0"));
            }
            Factor::J { a: a as u32, m: m as u32, pow: pow32 }
        }
        "P" => {
            let a = expect_exprs(&ctx, "P", args, &[3, 4])?;
            let sign = ctx.eval_int(a[0], "P sign")?;
            if sign != 1 && sign != -1 {
                return Err(ctx.diag(DiagnosticKind::Arity, format!("P sign must be 1 or -1, got {sign}")));
            }
            let x = if a.len() == 4 { ctx.eval_int(a[3], "x-degree")? } else { 0 };
            let spec = FactorSpec::new(sign as i8, ctx.eval(a[1])?, ctx.eval(a[2])?, x);
            Factor::P { spec, pow: pow32 }
        }
        "theta" => {
            no_pow("theta")?;
            if args.len() != 6 {
                return Err(ctx.diag(DiagnosticKind::Arity, format!("`theta` takes 6 arguments, got {}", args.len())));
            }
            let e = |i: usize| match &args[i] {
                Arg::Expr(e) => ctx.eval(e),
                Arg::List(_) => Err(ctx.diag(DiagnosticKind::Arity, "only the weight of `theta` is a list")),
            };
            let weight = match &args[3] {
                Arg::List(w) if w.len() == 1 || w.len() == 2 => {
                    let c0 = ctx.eval(&w[0])?;
                    let c1 = if w.len() == 2 { ctx.eval(&w[1])? } else { Rational::zero() };
                    (c0, c1)
                }
                Arg::Expr(x) => (ctx.eval(x)?, Rational::zero()),
                Arg::List(_) => return Err(ctx.diag(DiagnosticKind::Arity, "theta weight is [c0] or [c0, c1]")),
            };
            let int_arg = |i: usize| match &args[i] {
                Arg::Expr(x) => ctx.eval_int(x, "theta x coefficient"),
                Arg::List(_) => Err(ctx.diag(DiagnosticKind::Arity, "only the weight of `theta` is a list")),
            };
            let spec = ThetaSpec::plain(e(0)?, e(1)?, e(2)?)
                .with_weight(weight.0, weight.1)
                .with_x(int_arg(4)?, int_arg(5)?);
            if !spec.quad.is_positive() {
                return Err(ctx.diag(DiagnosticKind::Semantic, "theta needs a positive quadratic coefficient"));
            }
            Factor::Theta(spec)
        }
        "qpow" => {
            no_pow("qpow")?;
            let a = expect_exprs(&ctx, "qpow", args, &[1])?;
            Factor::QPow(ctx.eval(a[0])?)
        }
        "xpow" => {
            no_pow("xpow")?;
            let a = expect_exprs(&ctx, "xpow", args, &[1])?;
            Factor::XPow(ctx.eval_int(a[0], "x power")?)
        }
        "invq" => {
            if f.args.is_some() {
                return Err(ctx.diag(DiagnosticKind::Arity, "`invq` takes no arguments"));
            }
            if pow != 1 {
                return Err(ctx.diag(DiagnosticKind::Arity, "write powers of 1/(q;q) as J(1)^-n"));
            }
            Factor::InvQ
        }
        "andrews" => {
            no_pow("andrews")?;
            let a = expect_exprs(&ctx, "andrews", args, &[2])?;
            let k = ctx.eval_count(a[0], "k")?;
            let i = ctx.eval_count(a[1], "i")?;
            if k < 2 || i < 1 || i > k {
                return Err(ctx.diag(DiagnosticKind::Arity, "andrews(k, i) needs k >= 2 and 1 <= i <= k"));
            }
            Factor::Andrews { k, i }
        }
        other => {
            return Err(ctx.diag(
                DiagnosticKind::Arity,
                format!("unknown factor `{other}`; expected J, P, theta, qpow, xpow, invq or andrews"),
            ))
        }
    })
}

fn bind_rhs(env: &BTreeMap<String, Rational>, r: &RhsAst) -> BResult<RhsExpr> {
    let mut out = RhsExpr::default();
    for t in &r.terms {
        let mut c = match t.coeff {
            Some((n, Some(d))) => {
                if d == 0 {
                    let p = t.factors.first().map(|f| f.pos).unwrap_or_default();
                    return Err(Diagnostic::new(DiagnosticKind::Semantic, "zero denominator in coefficient", p.line, p.col));
                }
                Rational::new(n.into(), d.into())
            }
            Some((n, None)) => int(n),
            None => int(1),
        };
        if t.negative {
            c = -c;
        }
        let factors = t.factors.iter().map(|f| bind_factor(env, f)).collect::<BResult<Vec<_>>>()?;
        out.terms.push(Term { coeff: c, factors });
    }
    Ok(out)
}

/// Binds one item. Parameters are evaluated in source order; names used in
/// expressions must be defined by an earlier field.
pub fn bind_item(item: &Item) -> BResult<IdentityCase> {
    let mut seen: BTreeMap<&str, Pos> = BTreeMap::new();
    for f in &item.fields {
        let key = f.value.key();
        if seen.insert(key, f.pos).is_some() {
            return Err(Diagnostic::new(DiagnosticKind::Semantic, format!("field `{key}` given twice"), f.pos.line, f.pos.col));
        }
    }
    let mut env = BTreeMap::new();
    let mut params = BTreeMap::new();
    for f in &item.fields {
        if let FieldValue::Param(k, e) = &f.value {
            let v = Ctx { env: env.clone(), pos: f.pos }.eval(e)?;
            params.insert(k.clone(), fmt_rational(&v));
            env.insert(k.clone(), v);
        }
    }
    let find = |key: &str| item.fields.iter().find(|f| f.value.key() == key);
    let at = |p: Pos| Ctx { env: env.clone(), pos: p };
    let item_ctx = at(item.pos);

    let mfield = find("matrix").ok_or_else(|| item_ctx.diag(DiagnosticKind::Semantic, "missing `matrix` field"))?;
    let FieldValue::Matrix(m) = &mfield.value else { unreachable!() };
    let mctx = at(mfield.pos);
    let a = bind_matrix(&mctx, m)?;
    let k = a.dim();

    let vec_field = |key: &str| -> BResult<Option<(Vec<Rational>, Pos)>> {
        match find(key) {
            Some(Field { value: FieldValue::B(v) | FieldValue::XWeight(v), pos }) => {
                let c = at(*pos);
                let vals = v.iter().map(|e| c.eval(e)).collect::<BResult<Vec<_>>>()?;
                if vals.len() != k {
                    return Err(c.diag(DiagnosticKind::Arity, format!("`{key}` has {} entries, matrix is {k}x{k}", vals.len())));
                }
                Ok(Some((vals, *pos)))
            }
            _ => Ok(None),
        }
    };
    let b = vec_field("B")?.map(|v| v.0).unwrap_or_else(|| vec![Rational::zero(); k]);
    let c = env.get("C").cloned().unwrap_or_else(Rational::zero);
    let w: Vec<i64> = match vec_field("xweight")? {
        Some((v, pos)) => v
            .iter()
            .map(|x| {
                x.is_integer()
                    .then(|| x.to_integer().to_i64())
                    .flatten()
                    .ok_or_else(|| at(pos).diag(DiagnosticKind::Arity, "x-weights must be integers"))
            })
            .collect::<BResult<_>>()?,
        None => vec![0; k],
    };

    let order = match find("order") {
        Some(Field { value: FieldValue::Order(n), .. }) => *n,
        _ => DEFAULT_ORDER,
    };
    let rhs_field = find("rhs").ok_or_else(|| item_ctx.diag(DiagnosticKind::Semantic, "missing `rhs` field"))?;
    let FieldValue::Rhs(r) = &rhs_field.value else { unreachable!() };
    let rhs = bind_rhs(&env, r)?;

    let lhs = if let Some(Field { value: FieldValue::XCap(cap), pos }) = find("xcap") {
        for bad in ["parity", "basepow", "xslice"] {
            if find(bad).is_some() {
                return Err(at(*pos).diag(DiagnosticKind::Semantic, format!("`xcap` cannot be combined with `{bad}`")));
            }
        }
        Lhs::Capped { a, b, c, w, x_cap: *cap }
    } else {
        let sem = |p: Pos| move |e: crate::error::Error| Diagnostic::new(DiagnosticKind::Semantic, e.to_string(), p.line, p.col);
        let mut spec = NahmSpec::new(a).map_err(sem(mfield.pos))?.with_b(b).map_err(sem(mfield.pos))?.with_c(c);
        spec = spec.with_xweight(w).map_err(sem(mfield.pos))?;
        if let Some(Field { value: FieldValue::Parity(i, j, r), pos }) = find("parity") {
            let (i, j) = (usize::try_from(*i).unwrap_or(0), usize::try_from(*j).unwrap_or(0));
            let r = u8::try_from(r.rem_euclid(2)).unwrap_or(0);
            spec = spec.with_parity(i, j, r).map_err(|e| Diagnostic::new(DiagnosticKind::Arity, e.to_string(), pos.line, pos.col))?;
        }
        if let Some(Field { value: FieldValue::BasePow(m), pos }) = find("basepow") {
            let m = u32::try_from(*m).map_err(|_| at(*pos).diag(DiagnosticKind::Arity, "basepow must be a positive integer"))?;
            spec = spec.with_base_power(m).map_err(|e| Diagnostic::new(DiagnosticKind::Arity, e.to_string(), pos.line, pos.col))?;
        }
        let slice = match find("xslice") {
            Some(Field { value: FieldValue::XSlice(n), .. }) => Some(*n),
            _ => None,
        };
        Lhs::Nahm { spec, slice }
    };
    let mut case = IdentityCase::new(item.name.clone(), lhs, rhs, int(order));
    case.params = params;
    Ok(case)
}
