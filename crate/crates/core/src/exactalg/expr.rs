//! Tiny parser for rational-function expressions in `z`, e.g. `"-1/z"`,
//! `"1/z - z"`, `"2/(z-1)^2 + 3z"`.
//!
//! Grammar: sums of products of powers of atoms; atoms are numbers
//! (integers or finite decimals), `z`, or parenthesized expressions.
//! Juxtaposition multiplies (`3z`, `2(z+1)`).

use rug::Rational;

use super::json::parse_rational;
use super::{Poly, RatFunc};
use crate::error::{Error, Result};

pub fn parse_ratfunc(src: &str) -> Result<RatFunc> {
    let mut p = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let f = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        let text: String = self.chars.iter().collect();
        Error::Parse(format!("{msg} at position {} in {text:?}", self.pos))
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.div(&rhs)?;
                }
                Some(c) if c == 'z' || c == '(' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.err("expected integer exponent"))?;
            let p = base.pow(k);
            return if neg { p.recip() } else { Ok(p) };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(RatFunc::z())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let r: Rational = parse_rational(&text)?;
                Ok(RatFunc::from_poly(Poly::constant(r)))
            }
            _ => Err(self.err("expected number, 'z' or '('")),
        }
    }
}
