//! The `.qid` identity-spec language.
//!
//! ```text
//! identity "rr" {
//!     matrix = [[2]];
//!     rhs = J(5) * J(1,5)^-1;
//!     order = 50;
//! }
//! ```
//!
//! Parameters (`k`, `lambda`, `a`, `s`, `i`, `N`, `C`) take rational
//! expressions and may be used by later fields; `C` is the constant of the
//! quadratic form. Besides the fields of the core grammar, `xslice = N`
//! keeps only the `x^N` coefficient of the left side and `xcap = N` selects a
//! semidefinite sum that is exact up to `x^N`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::identities::{Factor, IdentityCase, Lhs, RhsExpr};
use crate::rational::Rational;

pub mod ast;
mod bind;
mod lexer;
mod parser;

pub use bind::{bind_item, DEFAULT_ORDER};

use ast::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    /// Wrong argument count or type, unknown builder or factor.
    Arity,
    /// Well-formed but meaningless: unknown names, duplicate fields, a
    /// matrix that is not positive definite.
    Semantic,
}

impl DiagnosticKind {
    pub fn name(self) -> &'static str {
        match self {
            DiagnosticKind::Lexical => "lexical",
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Arity => "arity",
            DiagnosticKind::Semantic => "semantic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned message. `line` and `col` are 1-based and point into the
/// original text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub col: usize,
    /// The source line, filled in by [`parse_spec`] and [`load_spec`].
    pub excerpt: String,
    pub file: Option<String>,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>, line: usize, col: usize) -> Diagnostic {
        Diagnostic {
            kind,
            severity: Severity::Error,
            message: message.into(),
            line,
            col,
            excerpt: String::new(),
            file: None,
        }
    }

    pub fn with_source(mut self, src: &str) -> Diagnostic {
        self.excerpt = src.lines().nth(self.line.saturating_sub(1)).unwrap_or("").to_string();
        self
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Diagnostic {
        self.file = Some(file.into());
        self
    }

    /// 2 for text that does not parse, 3 for a spec that parses but is invalid.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            DiagnosticKind::Lexical | DiagnosticKind::Syntax => 2,
            DiagnosticKind::Arity | DiagnosticKind::Semantic => 3,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let file = self.file.as_deref().unwrap_or("<input>");
        write!(f, "{file}:{}:{}: {sev}[{}]: {}", self.line, self.col, self.kind.name(), self.message)?;
        if !self.excerpt.is_empty() {
            let lead: String = self
                .excerpt
                .chars()
                .take(self.col.saturating_sub(1))
                .map(|c| if c == '\t' { '\t' } else { ' ' })
                .collect();
            write!(f, "\n  | {}\n  | {lead}^", self.excerpt)?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

/// Parses without binding; errors are lexical or syntax diagnostics.
pub fn parse_spec(text: &str) -> Result<SpecDocument, Diagnostic> {
    parser::parse(text).map_err(|d| d.with_source(text))
}

/// Parses and binds every item.
pub fn load_spec(text: &str) -> Result<Vec<IdentityCase>, Diagnostic> {
    let doc = parse_spec(text)?;
    doc.items.iter().map(|it| bind_item(it).map_err(|d| d.with_source(text))).collect()
}

fn rat_expr(r: &Rational) -> Option<Expr> {
    let n = r.numer().abs().to_i64()?;
    let d = r.denom().to_i64()?;
    let e = if d == 1 { Expr::Int(n) } else { Expr::Bin(BinOp::Div, Box::new(Expr::Int(n)), Box::new(Expr::Int(d))) };
    Some(if r.is_negative() { Expr::Neg(Box::new(e)) } else { e })
}

fn rat_exprs(v: &[Rational]) -> Option<Vec<Expr>> {
    v.iter().map(rat_expr).collect()
}

fn int_exprs(v: &[i64]) -> Vec<Expr> {
    v.iter().map(|&n| rat_expr(&Rational::from_integer(n.into())).expect("i64 fits")).collect()
}

fn factor_ast(f: &Factor) -> Option<FactorAst> {
    let e = |r: &Rational| rat_expr(r).map(Arg::Expr);
    let i = |n: i64| Arg::Expr(rat_expr(&Rational::from_integer(n.into())).expect("i64 fits"));
    let pow = |p: i32| (p != 1).then_some(p as i64);
    let mk = |name: &str, args: Option<Vec<Arg>>, pow: Option<i64>| FactorAst { name: name.into(), args, pow, pos: Pos::default() };
    Some(match f {
        Factor::J { a, m, pow: p } => {
            let args = if *a == 0 { vec![i(*m as i64)] } else { vec![i(*a as i64), i(*m as i64)] };
            mk("J", Some(args), pow(*p))
        }
        Factor::P { spec, pow: p } => {
            let mut args = vec![i(spec.sign as i64), e(&spec.q_exp)?, e(&spec.modulus)?];
            if spec.x_deg != 0 {
                args.push(i(spec.x_deg));
            }
            mk("P", Some(args), pow(*p))
        }
        Factor::Theta(t) => mk(
            "theta",
            Some(vec![
                e(&t.quad)?,
                e(&t.lin)?,
                e(&t.constant)?,
                Arg::List(rat_exprs(&[t.weight.0.clone(), t.weight.1.clone()])?),
                i(t.xlin),
                i(t.xconst),
            ]),
            None,
        ),
        Factor::QPow(r) => mk("qpow", Some(vec![e(r)?]), None),
        Factor::XPow(d) => mk("xpow", Some(vec![i(*d)]), None),
        Factor::InvQ => mk("invq", None, None),
        Factor::Andrews { k, i: j } => mk("andrews", Some(vec![i(*k as i64), i(*j as i64)]), None),
    })
}

fn rhs_ast(r: &RhsExpr) -> Option<RhsAst> {
    let mut terms = Vec::new();
    for t in &r.terms {
        let factors = t.factors.iter().map(factor_ast).collect::<Option<Vec<_>>>()?;
        let c = t.coeff.abs();
        let coeff = if c.is_one() && !factors.is_empty() {
            None
        } else {
            let d = c.denom().to_i64()?;
            Some((c.numer().to_i64()?, (d != 1).then_some(d)))
        };
        terms.push(TermAst { negative: t.coeff.is_negative(), coeff, factors });
    }
    if terms.is_empty() {
        terms.push(TermAst { negative: false, coeff: Some((0, None)), factors: Vec::new() });
    }
    Some(RhsAst { terms })
}

fn field(value: FieldValue) -> Field {
    Field { value, pos: Pos::default() }
}

/// Writes a case as a `.qid` item. Matrices are written as literals, so the
/// bound case is equal to `case` field for field. `None` when a number does
/// not fit the grammar's 64-bit integers.
pub fn to_item(case: &IdentityCase) -> Option<Item> {
    let mut fields = Vec::new();
    for (k, v) in &case.params {
        if k == "C" || !["k", "lambda", "a", "s", "i", "N"].contains(&k.as_str()) {
            continue;
        }
        if let Some(r) = crate::rational::parse_rational(v) {
            fields.push(field(FieldValue::Param(k.clone(), rat_expr(&r)?)));
        }
    }
    let a = case.lhs.matrix();
    let rows = a.rows().iter().map(|r| rat_exprs(r)).collect::<Option<Vec<_>>>()?;
    fields.push(field(FieldValue::Matrix(MatExpr::Rows(rows))));
    let (b, c, w): (&[Rational], &Rational, &[i64]) = match &case.lhs {
        Lhs::Nahm { spec, .. } => (spec.b(), spec.c(), spec.xweight()),
        Lhs::Capped { b, c, w, .. } => (b, c, w),
    };
    if b.iter().any(|x| !x.is_zero()) {
        fields.push(field(FieldValue::B(rat_exprs(b)?)));
    }
    if !c.is_zero() {
        fields.push(field(FieldValue::Param("C".into(), rat_expr(c)?)));
    }
    if w.iter().any(|&x| x != 0) {
        fields.push(field(FieldValue::XWeight(int_exprs(w))));
    }
    match &case.lhs {
        Lhs::Nahm { spec, slice } => {
            if let Some(p) = spec.parity() {
                fields.push(field(FieldValue::Parity(p.i as i64, p.j as i64, p.r as i64)));
            }
            if spec.base_power() != 1 {
                fields.push(field(FieldValue::BasePow(spec.base_power() as i64)));
            }
            if let Some(n) = slice {
                fields.push(field(FieldValue::XSlice(*n)));
            }
        }
        Lhs::Capped { x_cap, .. } => fields.push(field(FieldValue::XCap(*x_cap))),
    }
    fields.push(field(FieldValue::Rhs(rhs_ast(&case.rhs)?)));
    if !case.trunc.is_integer() {
        return None;
    }
    fields.push(field(FieldValue::Order(case.trunc.to_integer().to_i64()?)));
    Some(Item { name: case.name.clone(), fields, pos: Pos::default() })
}

/// [`to_item`] printed.
pub fn to_dsl(case: &IdentityCase) -> Option<String> {
    to_item(case).map(|it| it.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{builtin_case, catalog, verify_case};

    #[test]
    fn spec_examples_parse() {
        // parse only: with J(a, m) the full theta product, the product side
        // of this sum is J(5) * J(1,5)^-1
        let rr = r#"identity "rr" { matrix = [[2]]; rhs = etaq[ J(1,5)^-1 * J(2,5) * invq ]; order = 50; }"#;
        let doc = parse_spec(rr).unwrap();
        assert_eq!(doc.items[0].name, "rr");
        let t12 = r#"identity "t12" { a = 9/4; matrix = tildeA(4, 9/4); xweight = [0,0,1,-1]; parity(3,4)=0;
            rhs = product[ P(-1, 2a, 4a, 2) * P(-1, 2a, 4a, -2) * P(1, 4a, 4a) ] * invq; order = 30; }"#;
        let doc = parse_spec(t12).unwrap();
        let case = bind_item(&doc.items[0]).unwrap();
        assert_eq!(case.lhs.matrix().dim(), 4);
        assert_eq!(case.params["a"], "9/4");
    }

    #[test]
    fn missing_semicolon_points_after_previous_token() {
        let src = "identity \"x\" {\n  matrix = [[2]]\n  order = 5;\n}";
        let d = parse_spec(src).unwrap_err();
        assert_eq!((d.kind, d.line, d.col), (DiagnosticKind::Syntax, 2, 17));
        assert_eq!(d.exit_code(), 2);
        assert_eq!(d.excerpt, "  matrix = [[2]]");
    }

    #[test]
    fn semantic_and_arity_errors() {
        let bad = |s: &str| load_spec(s).unwrap_err();
        let d = bad("identity \"x\" { matrix = [[1, 2], [2, 1]]; rhs = invq; }");
        assert_eq!(d.kind, DiagnosticKind::Semantic);
        assert!(d.message.contains("pivot"), "{}", d.message);
        assert_eq!(d.exit_code(), 3);
        assert_eq!(bad("identity \"x\" { matrix = G(1, 2); rhs = invq; }").kind, DiagnosticKind::Arity);
        assert_eq!(bad("identity \"x\" { matrix = G(2); rhs = J(1, 2, 3); }").kind, DiagnosticKind::Arity);
        assert_eq!(bad("identity \"x\" { matrix = G(k); rhs = invq; }").kind, DiagnosticKind::Semantic);
        assert_eq!(bad("identity \"x\" { matrix = G(2); order = 3; order = 4; rhs = invq; }").kind, DiagnosticKind::Semantic);
        assert_eq!(bad("identity \"x\" { order = 3; }").kind, DiagnosticKind::Semantic);
        assert_eq!(bad("identity \"x\" { matrix = G(2); B = [1]; rhs = invq; }").kind, DiagnosticKind::Arity);
    }

    #[test]
    fn round_trip_is_stable() {
        let src = r#"
            # comment
            identity "a\"b" { k = 3; lambda = -1/2; a = 2k - (k+1)/3; matrix = tildeA(k, 9/4(k - 1));
              B = [0, -lambda, lambda/2]; xweight = [0, 1, -1]; parity(2, 3) = 1; basepow = 2;
              rhs = -2/3*qpow(-1/24)*theta(2, 1, 0, [1, 2], 1, 0) + J(5)^2 - P(-1, 1/2, 1) * invq^1; order = 12; }
            identity "c" { matrix = [[2, 1], [1, 2]]; xcap = 4; rhs = 3; }"#;
        let d1 = parse_spec(src).unwrap();
        let d2 = parse_spec(&d1.to_string()).unwrap();
        assert_eq!(d1, d2);
        assert_eq!(d1.to_string(), d2.to_string());
    }

    #[test]
    fn catalog_through_dsl_is_bit_exact() {
        let t = crate::rational::int(8);
        let mut seen = 0;
        for (entry, raw) in catalog().into_iter().flat_map(|e| [(e.clone(), false), (e, true)]) {
            let Ok(Some(case)) = builtin_case(entry.family, &entry.params, raw) else { continue };
            seen += 1;
            let text = to_dsl(&case).unwrap_or_else(|| panic!("{} not expressible", entry.label()));
            let bound = load_spec(&text).unwrap_or_else(|d| panic!("{}: {d}\n{text}", entry.label()));
            assert_eq!(bound.len(), 1);
            let b = &bound[0];
            assert_eq!(b.lhs, case.lhs, "{}", entry.label());
            assert_eq!(b.rhs, case.rhs, "{}", entry.label());
            assert_eq!(b.trunc, case.trunc);
            let (r1, r2) = (verify_case(&case, Some(&t)), verify_case(b, Some(&t)));
            assert_eq!(r1.status, r2.status);
            assert_eq!(case.lhs_series(&t).unwrap(), b.lhs_series(&t).unwrap());
        }
        assert!(seen >= 50, "only {seen} cases");
    }
}
