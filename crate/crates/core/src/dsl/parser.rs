use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, DiagnosticKind};

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

const PARAMS: &[&str] = &["k", "lambda", "a", "s", "i", "N", "C"];

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.at + n).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn pos(&self) -> Pos {
        let t = self.peek();
        Pos { line: t.line, col: t.col }
    }

    fn err_here(&self, msg: String) -> Diagnostic {
        let t = self.peek();
        Diagnostic::new(DiagnosticKind::Syntax, msg, t.line, t.col)
    }

    fn is(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.is(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, ctx: &str) -> PResult<()> {
        if self.eat(c) {
            return Ok(());
        }
        // a missing terminator is reported right after the previous token
        if matches!(c, ';' | ')' | ']' | '}') && self.at > 0 {
            let prev = &self.toks[self.at - 1];
            return Err(Diagnostic::new(
                DiagnosticKind::Syntax,
                format!("expected `{c}` {ctx}, found {}", self.peek().tok.describe()),
                prev.end_line,
                prev.end_col,
            ));
        }
        Err(self.err_here(format!("expected `{c}` {ctx}, found {}", self.peek().tok.describe())))
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let p = self.pos();
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, p))
            }
            t => Err(self.err_here(format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn int(&mut self, what: &str) -> PResult<i64> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            ref t => Err(self.err_here(format!("expected {what}, found {}", t.describe()))),
        }
    }

    fn signed_int(&mut self, what: &str) -> PResult<i64> {
        let neg = self.eat('-');
        let n = self.int(what)?;
        Ok(if neg { -n } else { n })
    }

    fn document(&mut self) -> PResult<SpecDocument> {
        let mut items = Vec::new();
        while self.peek().tok != Tok::Eof {
            items.push(self.item()?);
        }
        Ok(SpecDocument { items })
    }

    fn item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        match &self.peek().tok {
            Tok::Ident(s) if s == "identity" => {
                self.bump();
            }
            t => return Err(self.err_here(format!("expected `identity`, found {}", t.describe()))),
        }
        let name = match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            t => return Err(self.err_here(format!("expected identity name string, found {}", t.describe()))),
        };
        self.expect('{', "to open the identity body")?;
        let mut fields = Vec::new();
        while !self.is('}') {
            if self.peek().tok == Tok::Eof {
                return Err(self.err_here("expected `}` to close the identity body, found end of input".into()));
            }
            fields.push(self.field()?);
        }
        self.bump();
        Ok(Item { name, fields, pos })
    }

    fn field(&mut self) -> PResult<Field> {
        let pos = self.pos();
        let (key, _) = self.ident("a field name")?;
        let value = match key.as_str() {
            "parity" => {
                self.expect('(', "after `parity`")?;
                let i = self.int("an index")?;
                self.expect(',', "between parity indices")?;
                let j = self.int("an index")?;
                self.expect(')', "after parity indices")?;
                self.expect('=', "after `parity(i, j)`")?;
                let r = self.int("a residue")?;
                FieldValue::Parity(i, j, r)
            }
            k if PARAMS.contains(&k) => {
                self.expect('=', &format!("after `{k}`"))?;
                FieldValue::Param(key.clone(), self.expr()?)
            }
            "matrix" => {
                self.expect('=', "after `matrix`")?;
                FieldValue::Matrix(self.matexpr()?)
            }
            "B" | "xweight" => {
                self.expect('=', &format!("after `{key}`"))?;
                let v = self.list()?;
                if key == "B" {
                    FieldValue::B(v)
                } else {
                    FieldValue::XWeight(v)
                }
            }
            "basepow" | "order" | "xcap" => {
                self.expect('=', &format!("after `{key}`"))?;
                let n = self.int("an integer")?;
                match key.as_str() {
                    "basepow" => FieldValue::BasePow(n),
                    "order" => FieldValue::Order(n),
                    _ => FieldValue::XCap(n),
                }
            }
            "xslice" => {
                self.expect('=', "after `xslice`")?;
                FieldValue::XSlice(self.signed_int("an integer")?)
            }
            "rhs" => {
                self.expect('=', "after `rhs`")?;
                FieldValue::Rhs(self.rhs()?)
            }
            other => {
                return Err(Diagnostic::new(
                    DiagnosticKind::Syntax,
                    format!("unknown field `{other}`"),
                    pos.line,
                    pos.col,
                ))
            }
        };
        self.expect(';', "after field value")?;
        Ok(Field { value, pos })
    }

    fn list(&mut self) -> PResult<Vec<Expr>> {
        self.expect('[', "to open a list")?;
        let mut v = Vec::new();
        if !self.is(']') {
            loop {
                v.push(self.expr()?);
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(']', "to close a list")?;
        Ok(v)
    }

    fn matexpr(&mut self) -> PResult<MatExpr> {
        if self.is('[') {
            self.bump();
            let mut rows = Vec::new();
            loop {
                rows.push(self.list()?);
                if !self.eat(',') {
                    break;
                }
            }
            self.expect(']', "to close the matrix")?;
            return Ok(MatExpr::Rows(rows));
        }
        let (name, pos) = self.ident("a matrix builder or `[`")?;
        let args = self.args()?;
        Ok(MatExpr::Builder { name, args, pos })
    }

    fn args(&mut self) -> PResult<Vec<Arg>> {
        self.expect('(', "to open an argument list")?;
        let mut v = Vec::new();
        if !self.is(')') {
            loop {
                if self.is('[') {
                    v.push(Arg::List(self.list()?));
                } else {
                    v.push(Arg::Expr(self.expr()?));
                }
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(')', "to close the argument list")?;
        Ok(v)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            let op = if self.is('+') {
                BinOp::Add
            } else if self.is('-') {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            self.bump();
            let r = self.term()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = if self.is('*') {
                self.bump();
                BinOp::Mul
            } else if self.is('/') {
                self.bump();
                BinOp::Div
            } else if matches!(e, Expr::Int(_) | Expr::Bin(BinOp::Div, _, _))
                && ends_in_int(&e)
                && matches!(self.peek().tok, Tok::Ident(_) | Tok::Punct('('))
            {
                // `2a`, `9/4(k - 1)`
                BinOp::Mul
            } else {
                return Ok(e);
            };
            let r = self.unary()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let p = self.pos();
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Name(s, p))
            }
            Tok::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', "to close the parenthesis")?;
                Ok(e)
            }
            t => Err(self.err_here(format!("expected a number, a name or `(`, found {}", t.describe()))),
        }
    }

    fn rhs(&mut self) -> PResult<RhsAst> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        loop {
            terms.push(self.rhs_term(negative)?);
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                return Ok(RhsAst { terms });
            }
        }
    }

    fn rhs_term(&mut self, negative: bool) -> PResult<TermAst> {
        let mut coeff = None;
        let mut factors = Vec::new();
        if let Tok::Int(n) = self.peek().tok {
            self.bump();
            let d = if self.is('/') && matches!(self.peek_at(1), Tok::Int(_)) {
                self.bump();
                Some(self.int("a denominator")?)
            } else {
                None
            };
            coeff = Some((n, d));
            if self.eat('*') || matches!(self.peek().tok, Tok::Ident(_)) {
                self.factor_or_group(&mut factors)?;
            } else {
                return Ok(TermAst { negative, coeff, factors });
            }
        } else {
            self.factor_or_group(&mut factors)?;
        }
        while self.eat('*') {
            self.factor_or_group(&mut factors)?;
        }
        Ok(TermAst { negative, coeff, factors })
    }

    /// `etaq[f * g]` and `product[f * g]` only group; their factors join the term.
    fn factor_or_group(&mut self, out: &mut Vec<FactorAst>) -> PResult<()> {
        let group = matches!(&self.peek().tok, Tok::Ident(s) if s == "etaq" || s == "product")
            && *self.peek_at(1) == Tok::Punct('[');
        if !group {
            out.push(self.factor()?);
            return Ok(());
        }
        self.bump();
        self.bump();
        loop {
            out.push(self.factor()?);
            if !self.eat('*') {
                break;
            }
        }
        self.expect(']', "to close the factor group")
    }

    fn factor(&mut self) -> PResult<FactorAst> {
        let (name, pos) = self.ident("a factor such as J, P, theta, qpow or invq")?;
        let args = if self.is('(') { Some(self.args()?) } else { None };
        let pow = if self.eat('^') { Some(self.signed_int("an integer exponent")?) } else { None };
        Ok(FactorAst { name, args, pow, pos })
    }
}

fn ends_in_int(e: &Expr) -> bool {
    match e {
        Expr::Int(_) => true,
        Expr::Bin(BinOp::Div, a, b) => matches!(**a, Expr::Int(_)) && matches!(**b, Expr::Int(_)),
        _ => false,
    }
}

pub fn parse(src: &str) -> Result<SpecDocument, Diagnostic> {
    let toks = lex(src)?;
    Parser { toks, at: 0 }.document()
}
