//! Recursive-descent parser for the map-expression grammar.
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | power
//! power   := atom [ "^" [ "-" ] integer ]
//! atom    := "z" | "id" | number | call | "(" expr ")"
//! call    := "aut" "(" cexpr "," cexpr ")"
//!          | "blaschke" "(" cexpr ";" cexpr { "," cexpr } ")"
//!          | "compose" "(" expr "," expr ")"
//! number  := float [ "i" ]
//! ```
//! `cexpr` is an `expr` without `z`; it folds to a complex constant, so
//! literals like `0.3-0.2i` work in argument positions.

use num_complex::Complex64;
use thiserror::Error;

use super::MapExpr;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col} (byte {offset}): {msg}")]
    Syntax { offset: usize, line: usize, col: usize, msg: String },
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("wrong arity for `{name}` at {line}:{col}: {msg}")]
    Arity { name: String, line: usize, col: usize, msg: String },
    #[error("domain error at {line}:{col}: {msg}")]
    Domain { line: usize, col: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number { value: f64, imaginary: bool },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;
    while i < bytes.len() {
        let (offset, l, c) = (i, line, col);
        let ch = bytes[i] as char;
        let advance = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        match ch {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => advance(&mut i, &mut col, 1),
            '+' => {
                toks.push(Spanned { tok: Tok::Plus, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '-' => {
                toks.push(Spanned { tok: Tok::Minus, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '*' => {
                toks.push(Spanned { tok: Tok::Star, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '/' => {
                toks.push(Spanned { tok: Tok::Slash, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '^' => {
                toks.push(Spanned { tok: Tok::Caret, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '(' => {
                toks.push(Spanned { tok: Tok::LParen, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            ')' => {
                toks.push(Spanned { tok: Tok::RParen, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            ',' => {
                toks.push(Spanned { tok: Tok::Comma, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            ';' => {
                toks.push(Spanned { tok: Tok::Semi, offset, line: l, col: c });
                advance(&mut i, &mut col, 1);
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text_num = &text[start..i];
                let value: f64 = text_num.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    line: l,
                    col: c,
                    msg: format!("bad number `{text_num}`"),
                })?;
                // trailing `i` marks an imaginary literal unless it starts an identifier
                let imaginary = i < bytes.len()
                    && bytes[i] == b'i'
                    && !(i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_'));
                if imaginary {
                    i += 1;
                }
                col += i - start;
                toks.push(Spanned { tok: Tok::Number { value, imaginary }, offset, line: l, col: c });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                col += i - start;
                toks.push(Spanned {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset,
                    line: l,
                    col: c,
                });
            }
            other => {
                return Err(ParseError::Syntax {
                    offset,
                    line: l,
                    col: c,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    toks.push(Spanned { tok: Tok::Eof, offset: bytes.len(), line, col });
    Ok(toks)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax { offset: t.offset, line: t.line, col: t.col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<MapExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = MapExpr::add(acc, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = MapExpr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MapExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = MapExpr::mul(acc, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    acc = MapExpr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MapExpr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            Ok(MapExpr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<MapExpr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let mut sign = 1i32;
        if self.peek().tok == Tok::Minus {
            self.bump();
            sign = -1;
        }
        match self.peek().tok.clone() {
            Tok::Number { value, imaginary: false } if value.fract() == 0.0 => {
                self.bump();
                Ok(MapExpr::pow(base, sign * value as i32))
            }
            _ => self.syntax("expected integer exponent after `^`"),
        }
    }

    fn atom(&mut self) -> Result<MapExpr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Number { value, imaginary } => {
                self.bump();
                Ok(MapExpr::Const(if imaginary {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                }))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let span = self.bump();
                match name.as_str() {
                    "z" => Ok(MapExpr::Var),
                    "id" => Ok(MapExpr::Id),
                    "aut" => self.call_aut(&span),
                    "blaschke" => self.call_blaschke(&span),
                    "compose" => self.call_compose(&span),
                    _ => Err(ParseError::UnknownIdentifier {
                        name,
                        line: span.line,
                        col: span.col,
                    }),
                }
            }
            _ => self.syntax("expected expression"),
        }
    }

    /// Constant subexpression: an `expr` that folded down to a literal.
    fn const_expr(&mut self, ctx: &str, span: &Spanned) -> Result<Complex64, ParseError> {
        match self.expr()? {
            MapExpr::Const(c) => Ok(c),
            _ => Err(ParseError::Arity {
                name: ctx.to_string(),
                line: span.line,
                col: span.col,
                msg: "argument must be a constant".into(),
            }),
        }
    }

    fn real_const(&mut self, ctx: &str, span: &Spanned) -> Result<f64, ParseError> {
        let c = self.const_expr(ctx, span)?;
        if c.im.abs() > 1e-12 {
            return Err(ParseError::Domain {
                line: span.line,
                col: span.col,
                msg: format!("{ctx}: angle argument must be real"),
            });
        }
        Ok(c.re)
    }

    fn disk_const(&mut self, ctx: &str, span: &Spanned) -> Result<Complex64, ParseError> {
        let c = self.const_expr(ctx, span)?;
        if c.norm() >= 1.0 {
            return Err(ParseError::Domain {
                line: span.line,
                col: span.col,
                msg: format!("{ctx}: point {} is not inside the unit disk", super::fmt_complex(c)),
            });
        }
        Ok(c)
    }

    fn call_aut(&mut self, span: &Spanned) -> Result<MapExpr, ParseError> {
        self.expect(Tok::LParen, "`(` after `aut`")?;
        let a = self.disk_const("aut", span)?;
        self.expect(Tok::Comma, "`,` between aut arguments")?;
        let theta = self.real_const("aut", span)?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(MapExpr::Aut { a, theta })
    }

    fn call_blaschke(&mut self, span: &Spanned) -> Result<MapExpr, ParseError> {
        self.expect(Tok::LParen, "`(` after `blaschke`")?;
        let theta = self.real_const("blaschke", span)?;
        self.expect(Tok::Semi, "`;` after the blaschke rotation angle")?;
        let mut zeros = vec![self.disk_const("blaschke", span)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            zeros.push(self.disk_const("blaschke", span)?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(MapExpr::Blaschke { theta, zeros })
    }

    fn call_compose(&mut self, span: &Spanned) -> Result<MapExpr, ParseError> {
        self.expect(Tok::LParen, "`(` after `compose`")?;
        let f = self.expr()?;
        if self.peek().tok != Tok::Comma {
            return Err(ParseError::Arity {
                name: "compose".into(),
                line: span.line,
                col: span.col,
                msg: "compose takes exactly two arguments".into(),
            });
        }
        self.bump();
        let g = self.expr()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok(MapExpr::Compose(Box::new(f), Box::new(g)))
    }
}

/// Parse an expression into a [`MapExpr`]. `unparse` of the result re-parses
/// to an identical tree.
pub fn parse(text: &str) -> Result<MapExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_shapes() {
        assert_eq!(parse("z^2").unwrap(), MapExpr::Pow(Box::new(MapExpr::Var), 2));
        assert_eq!(
            parse("aut(0.5, 0)").unwrap(),
            MapExpr::Aut { a: Complex64::new(0.5, 0.0), theta: 0.0 }
        );
        let e = parse("compose(blaschke(0; 0.3, -0.2i), z^2)").unwrap();
        match &e {
            MapExpr::Compose(f, g) => {
                assert_eq!(
                    **f,
                    MapExpr::Blaschke {
                        theta: 0.0,
                        zeros: vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, -0.2)],
                    }
                );
                assert_eq!(**g, MapExpr::Pow(Box::new(MapExpr::Var), 2));
            }
            other => panic!("expected compose node, got {other:?}"),
        }
        // unparse/reparse fixpoint
        assert_eq!(parse(&e.unparse()).unwrap(), e);
    }

    #[test]
    fn complex_literals_fold() {
        assert_eq!(parse("0.3-0.2i").unwrap(), MapExpr::Const(Complex64::new(0.3, -0.2)));
        assert_eq!(parse("-0.25").unwrap(), MapExpr::Const(Complex64::new(-0.25, 0.0)));
        assert_eq!(parse("2i*0.5").unwrap(), MapExpr::Const(Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn errors_carry_position() {
        match parse("z +\n @") {
            Err(ParseError::Syntax { line, col, .. }) => {
                assert_eq!((line, col), (2, 2));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("w + 1"), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("aut(0.5)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("compose(z)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("blaschke(0; 1.5)"), Err(ParseError::Domain { .. })));
        assert!(matches!(parse("aut(z, 0)"), Err(ParseError::Arity { .. })));
    }

    #[test]
    fn precedence_and_unparse() {
        let e = parse("z^2 + 0.5*z - z/(1 - 0.5*z)").unwrap();
        assert_eq!(parse(&e.unparse()).unwrap(), e);
        let e = parse("-(z^2 - 0.1)*z").unwrap();
        assert_eq!(parse(&e.unparse()).unwrap(), e);
        let e = parse("(z^2)^3").unwrap();
        assert_eq!(parse(&e.unparse()).unwrap(), e);
    }
}
