use super::{Diagnostic, DiagnosticKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Punct(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// A token with the 1-based position of its first character and of the
/// character just past it.
#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub end_line: usize,
    pub end_col: usize,
}

const PUNCT: &str = "{}()[],;=+-*/^";

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let adv = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            adv(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                adv(&mut i, &mut line, &mut col, ch);
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                let ch = chars[i];
                adv(&mut i, &mut line, &mut col, ch);
            }
            match s.parse::<i64>() {
                Ok(n) => Tok::Int(n),
                Err(_) => {
                    return Err(Diagnostic::new(DiagnosticKind::Lexical, format!("integer literal `{s}` is too large"), l0, c0))
                }
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                let ch = chars[i];
                adv(&mut i, &mut line, &mut col, ch);
            }
            Tok::Ident(s)
        } else if c == '"' {
            adv(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(Diagnostic::new(DiagnosticKind::Lexical, "unterminated string literal", l0, c0))
                    }
                    Some('"') => {
                        adv(&mut i, &mut line, &mut col, '"');
                        break;
                    }
                    Some('\\') => {
                        let next = chars.get(i + 1).copied();
                        match next {
                            Some(e @ ('"' | '\\')) => {
                                s.push(e);
                                adv(&mut i, &mut line, &mut col, '\\');
                                adv(&mut i, &mut line, &mut col, e);
                            }
                            _ => {
                                return Err(Diagnostic::new(
                                    DiagnosticKind::Lexical,
                                    "unknown escape in string literal",
                                    line,
                                    col,
                                ))
                            }
                        }
                    }
                    Some(&ch) => {
                        s.push(ch);
                        adv(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            Tok::Str(s)
        } else if PUNCT.contains(c) {
            adv(&mut i, &mut line, &mut col, c);
            Tok::Punct(c)
        } else {
            return Err(Diagnostic::new(DiagnosticKind::Lexical, format!("unexpected character `{c}`"), l0, c0));
        };
        out.push(Token { tok, line: l0, col: c0, end_line: line, end_col: col });
    }
    out.push(Token { tok: Tok::Eof, line, col, end_line: line, end_col: col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let t = lex("a = 12; # note\n  b\"x\"").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("a".into()));
        assert_eq!((t[2].line, t[2].col, t[2].end_col), (1, 5, 7));
        assert_eq!((t[4].line, t[4].col), (2, 3));
        assert_eq!(t[5].tok, Tok::Str("x".into()));
        assert_eq!(t.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn lexical_errors() {
        let d = lex("a = $").unwrap_err();
        assert_eq!((d.kind, d.line, d.col), (DiagnosticKind::Lexical, 1, 5));
        assert_eq!(lex("\"open").unwrap_err().kind, DiagnosticKind::Lexical);
        assert!(lex("99999999999999999999").is_err());
    }
}
