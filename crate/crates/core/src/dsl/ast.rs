//! Syntax tree of `.qid` files and its canonical printer.

use std::fmt;

/// Source position. Always compares equal so that trees parsed from
/// differently formatted text are equal when their content is.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn prec(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// Rational-valued expression over the item's parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Name(String, Pos),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Int(_) | Expr::Name(..) => 4,
            Expr::Neg(_) => 3,
            Expr::Bin(op, ..) => op.prec(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Int(n) => write!(f, "{n}")?,
            Expr::Name(s, _) => f.write_str(s)?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write(f, 3)?;
            }
            Expr::Bin(op, a, b) => {
                a.write(f, op.prec())?;
                f.write_str(op.symbol())?;
                b.write(f, op.prec() + 1)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

fn list(f: &mut fmt::Formatter<'_>, v: &[Expr]) -> fmt::Result {
    f.write_str("[")?;
    for (i, e) in v.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    f.write_str("]")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Expr(Expr),
    List(Vec<Expr>),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Expr(e) => write!(f, "{e}"),
            Arg::List(v) => list(f, v),
        }
    }
}

fn args(f: &mut fmt::Formatter<'_>, a: &[Arg]) -> fmt::Result {
    f.write_str("(")?;
    for (i, x) in a.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatExpr {
    Builder { name: String, args: Vec<Arg>, pos: Pos },
    Rows(Vec<Vec<Expr>>),
}

impl fmt::Display for MatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatExpr::Builder { name, args: a, .. } => {
                f.write_str(name)?;
                args(f, a)
            }
            MatExpr::Rows(rows) => {
                f.write_str("[")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    list(f, r)?;
                }
                f.write_str("]")
            }
        }
    }
}

/// `name`, `name(args)`, optionally raised to an integer power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorAst {
    pub name: String,
    pub args: Option<Vec<Arg>>,
    pub pow: Option<i64>,
    pub pos: Pos,
}

impl fmt::Display for FactorAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(a) = &self.args {
            args(f, a)?;
        }
        if let Some(p) = self.pow {
            write!(f, "^{p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermAst {
    pub negative: bool,
    /// `num` or `num/den`.
    pub coeff: Option<(i64, Option<i64>)>,
    pub factors: Vec<FactorAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhsAst {
    pub terms: Vec<TermAst>,
}

impl fmt::Display for RhsAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            match (i, t.negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut first = true;
            if let Some((n, d)) = t.coeff {
                write!(f, "{n}")?;
                if let Some(d) = d {
                    write!(f, "/{d}")?;
                }
                first = false;
            }
            for fa in &t.factors {
                if !first {
                    f.write_str("*")?;
                }
                write!(f, "{fa}")?;
                first = false;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldValue {
    /// `k`, `lambda`, `a`, `s`, `i`, `N` or `C`.
    Param(String, Expr),
    Matrix(MatExpr),
    B(Vec<Expr>),
    XWeight(Vec<Expr>),
    Parity(i64, i64, i64),
    BasePow(i64),
    Order(i64),
    Rhs(RhsAst),
    XSlice(i64),
    XCap(i64),
}

impl FieldValue {
    pub fn key(&self) -> &str {
        match self {
            FieldValue::Param(k, _) => k,
            FieldValue::Matrix(_) => "matrix",
            FieldValue::B(_) => "B",
            FieldValue::XWeight(_) => "xweight",
            FieldValue::Parity(..) => "parity",
            FieldValue::BasePow(_) => "basepow",
            FieldValue::Order(_) => "order",
            FieldValue::Rhs(_) => "rhs",
            FieldValue::XSlice(_) => "xslice",
            FieldValue::XCap(_) => "xcap",
        }
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Param(k, e) => write!(f, "{k} = {e};"),
            FieldValue::Matrix(m) => write!(f, "matrix = {m};"),
            FieldValue::B(v) => {
                f.write_str("B = ")?;
                list(f, v)?;
                f.write_str(";")
            }
            FieldValue::XWeight(v) => {
                f.write_str("xweight = ")?;
                list(f, v)?;
                f.write_str(";")
            }
            FieldValue::Parity(i, j, r) => write!(f, "parity({i}, {j}) = {r};"),
            FieldValue::BasePow(m) => write!(f, "basepow = {m};"),
            FieldValue::Order(n) => write!(f, "order = {n};"),
            FieldValue::Rhs(r) => write!(f, "rhs = {r};"),
            FieldValue::XSlice(n) => write!(f, "xslice = {n};"),
            FieldValue::XCap(n) => write!(f, "xcap = {n};"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub value: FieldValue,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub name: String,
    pub fields: Vec<Field>,
    pub pos: Pos,
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity \"{}\" {{", self.name.replace('\\', "\\\\").replace('"', "\\\""))?;
        for fd in &self.fields {
            writeln!(f, "    {}", fd.value)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SpecDocument {
    pub items: Vec<Item>,
}

impl fmt::Display for SpecDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            writeln!(f, "{it}")?;
        }
        Ok(())
    }
}
