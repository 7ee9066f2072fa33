//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := '-' factor | atom ('^' nat)?
//! atom     := rational | var | '(' expr ')'
//! var      := 'x' nat
//! rational := nat ('/' nat)? | nat '.' digits
//! ```
//!
//! `^` binds tighter than unary minus, so `-x0^2` is `-(x0^2)`. It is not
//! associative: `x0^2^3` is rejected. A minus sign directly in front of a
//! bare numeric literal produces a negative constant rather than a `Neg`
//! node.

use num_bigint::BigInt;
use num_traits::Zero;

use super::Expr;
use crate::error::ParseError;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number { whole: String, frac: Option<String> },
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number { whole, frac: None } => format!("number {whole}"),
            Tok::Number {
                whole,
                frac: Some(f),
            } => format!("number {whole}.{f}"),
            Tok::Var(i) => format!("variable x{i}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    let digits = |i: &mut usize| -> String {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect()
    };
    while i < chars.len() {
        let c = chars[i];
        let (tok_line, tok_col) = (line, column);
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
                continue;
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '-' | '\u{2212}' => {
                i += 1;
                Tok::Minus
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '/' => {
                i += 1;
                Tok::Slash
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            'x' => {
                i += 1;
                let n = digits(&mut i);
                let index = n.parse().map_err(|_| ParseError {
                    line: tok_line,
                    column: tok_col,
                    message: "variable name must be 'x' followed by an index".into(),
                    expected: vec!["variable index".into()],
                })?;
                Tok::Var(index)
            }
            c if c.is_ascii_digit() => {
                let whole = digits(&mut i);
                let frac = if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    let f = digits(&mut i);
                    if f.is_empty() {
                        return Err(ParseError {
                            line,
                            column: column + (i - start),
                            message: "decimal point must be followed by digits".into(),
                            expected: vec!["digit".into()],
                        });
                    }
                    Some(f)
                } else {
                    None
                };
                Tok::Number { whole, frac }
            }
            other => {
                return Err(ParseError {
                    line,
                    column,
                    message: format!("unexpected character {other:?}"),
                    expected: vec!["expression".into()],
                })
            }
        };
        column += i - start;
        out.push(Spanned {
            tok,
            line: tok_line,
            column: tok_col,
        });
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const ATOM_START: [&str; 4] = ["number", "variable", "'('", "'-'"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            column: here.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?.0;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?.0);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?.0);
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// Returns the factor and whether it was a bare numeric literal.
    fn factor(&mut self) -> Result<(Expr, bool), ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let (inner, literal) = self.factor()?;
            return Ok(match inner {
                Expr::Const(c) if literal => (Expr::Const(-c), true),
                other => (Expr::neg(other), false),
            });
        }
        let (base, literal) = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok((base, literal));
        }
        self.bump();
        let exponent = match self.peek().clone() {
            Tok::Number { whole, frac: None } => whole
                .parse::<u32>()
                .map_err(|_| self.error("exponent is too large", &["exponent below 2^32"]))?,
            _ => {
                return Err(self.error(
                    "exponent must be a nonnegative integer literal",
                    &["natural number"],
                ))
            }
        };
        self.bump();
        if *self.peek() == Tok::Caret {
            return Err(self.error(
                "'^' is not associative; add parentheses",
                &["'*'", "'/'", "'+'", "'-'", "')'", "end of input"],
            ));
        }
        Ok((Expr::pow(base, exponent), false))
    }

    fn atom(&mut self) -> Result<(Expr, bool), ParseError> {
        match self.peek().clone() {
            Tok::Number { whole, frac } => {
                self.bump();
                let value = match frac {
                    Some(f) => rational::parse(&format!("{whole}.{f}"))
                        .expect("lexer produced a valid decimal"),
                    None => {
                        let numer: BigInt = whole.parse().expect("lexer produced digits");
                        if let (
                            Tok::Slash,
                            Tok::Number {
                                whole: d,
                                frac: None,
                            },
                        ) = (self.peek(), self.peek_at(1).clone())
                        {
                            self.bump();
                            let denom: BigInt = d.parse().expect("lexer produced digits");
                            if denom.is_zero() {
                                return Err(self.error(
                                    "zero denominator in rational literal",
                                    &["nonzero natural number"],
                                ));
                            }
                            self.bump();
                            Rational::new(numer, denom)
                        } else {
                            Rational::from_integer(numer)
                        }
                    }
                };
                Ok((Expr::Const(value), true))
            }
            Tok::Var(i) => {
                self.bump();
                Ok((Expr::Var(i), false))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(
                        format!("unexpected {}", self.peek().describe()),
                        &["')'", "'+'", "'-'", "'*'", "'/'"],
                    ));
                }
                self.bump();
                Ok((inner, false))
            }
            other => Err(self.error(format!("unexpected {}", other.describe()), &ATOM_START)),
        }
    }
}

/// Parses an expression in the grammar above.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(
            format!("unexpected {}", parser.peek().describe()),
            &["'+'", "'-'", "'*'", "'/'", "end of input"],
        ));
    }
    Ok(e)
}
