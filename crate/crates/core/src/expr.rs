//! Recursive-descent parser for polynomial expressions in `x`, `y`, `z`.
//!
//! ```text
//! expr     := sign? term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' nonnegint)?
//! base     := rational | var | '(' expr ')'
//! var      := 'x' | 'y' | 'z'
//! rational := int ('/' posint)?
//! ```
//!
//! Implicit multiplication is rejected. A single leading sign is accepted
//! so that printed polynomials (`-x + 1`) parse back.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{Poly, Rational};
use crate::error::{Error, Result};

pub const VARIABLES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialExpression {
    pub source: String,
    /// Always over `x, y, z`; use [`PolynomialExpression::over`] to narrow.
    pub parsed: Poly,
    pub variables: BTreeSet<String>,
}

impl PolynomialExpression {
    /// The polynomial re-expressed over `vars`, failing if it uses a variable
    /// outside that list.
    pub fn over(&self, vars: &[&str]) -> Result<Poly> {
        let target: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        self.parsed.embed(&target)
    }
}

pub fn parse_polynomial(text: &str) -> Result<PolynomialExpression> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    let variables = VARIABLES
        .iter()
        .enumerate()
        .filter(|(i, _)| poly.depends_on(*i))
        .map(|(_, v)| v.to_string())
        .collect();
    Ok(PolynomialExpression {
        source: text.to_string(),
        parsed: poly,
        variables,
    })
}

/// Convenience: parse and narrow to `vars` in one step.
pub fn parse_over(text: &str, vars: &[&str]) -> Result<Poly> {
    parse_polynomial(text)?.over(vars)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else {
                match self.peek() {
                    Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                        return Err(self.err("implicit multiplication is not allowed"));
                    }
                    _ => return Ok(acc),
                }
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.base()?;
        if self.eat(b'^') {
            let start = self.pos;
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {}
                _ => {
                    return Err(Error::Syntax {
                        position: start,
                        message: "exponent must be a nonnegative integer literal".into(),
                    })
                }
            }
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut value = Rational::from_integer(n);
                // `3/2` is a literal; `/` anywhere else is an error.
                if self.eat(b'/') {
                    match self.peek() {
                        Some(c) if c.is_ascii_digit() => {}
                        _ => return Err(self.err("expected a positive integer denominator")),
                    }
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    value /= Rational::from_integer(d);
                }
                Ok(Poly::constant(&VARIABLES, value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Poly::var(&VARIABLES, name)
            }
            Some(_) => Err(self.err("expected a number, variable or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().map_err(|_| Error::Syntax {
            position: start,
            message: "expected an integer".into(),
        })
    }
}
