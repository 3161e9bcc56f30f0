//! Text grammar for polynomials.
//!
//! ```text
//! expr    := sign? term (sign term)*
//! term    := factor ('*' factor)*
//! factor  := primary ('^' integer)?
//! primary := integer ('/' integer)? | variable | '(' expr ')'
//! ```
//!
//! Variables are `x1..x6`, `y1..y6`, `a1..a6`, `b1..b6` and `t`. Whitespace
//! is ignored and juxtaposition is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Kind, Poly, Variable};
use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Character offset of the offending token.
    pub position: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at position {}: expected {}, found {}",
            self.position, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*^/()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError {
                position: i,
                expected: "a number, variable, operator or parenthesis".into(),
                found: format!("`{c}`"),
            });
        }
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

fn variable(name: &str) -> Option<Variable> {
    if name == "t" {
        return Some(Variable::t());
    }
    let mut chars = name.chars();
    let kind = match chars.next()? {
        'x' => Kind::X,
        'y' => Kind::Y,
        'a' => Kind::Alpha,
        'b' => Kind::Beta,
        _ => return None,
    };
    let rest = chars.as_str();
    if rest.len() != 1 {
        return None;
    }
    let idx: usize = rest.parse().ok()?;
    (1..=6).contains(&idx).then(|| Variable::new(kind, idx))
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn error(&self, expected: &str) -> ParseError {
        let (position, tok) = &self.toks[self.pos];
        ParseError {
            position: *position,
            expected: expected.into(),
            found: tok.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = Poly::zero();
        let mut negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        loop {
            let t = self.term()?;
            if negate {
                acc -= &t;
            } else {
                acc += &t;
            }
            if self.eat('+') {
                negate = false;
            } else if self.eat('-') {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            match self.peek().clone() {
                Tok::Int(n) => {
                    let e = n.to_u32().filter(|&e| e <= 64).ok_or_else(|| self.error("an exponent at most 64"))?;
                    self.pos += 1;
                    Ok(base.pow(e))
                }
                _ => Err(self.error("a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Poly, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                if self.eat('/') {
                    match self.peek().clone() {
                        Tok::Int(d) if !d.is_zero() => {
                            self.pos += 1;
                            Ok(Poly::constant(Rational::new(n, d)))
                        }
                        _ => Err(self.error("a nonzero integer denominator")),
                    }
                } else {
                    Ok(Poly::constant(Rational::from_integer(n)))
                }
            }
            Tok::Ident(name) => match variable(&name) {
                Some(v) => {
                    self.pos += 1;
                    Ok(Poly::var(v))
                }
                None => Err(self.error("a variable x1..x6, y1..y6, a1..a6, b1..b6 or t")),
            },
            Tok::Sym('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.error("a number, variable or `(`")),
        }
    }
}

/// Parses a polynomial in the grammar above.
pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let out = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(out)
}
