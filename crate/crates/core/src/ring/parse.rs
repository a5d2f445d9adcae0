//! Infix expression syntax for ring elements, e.g. `x^5 + 5*x*(1 + y)/(x - 1)^2`.
//!
//! `^` takes an integer exponent (negative means inverse). Division and
//! negative powers require the divisor to be a unit of the ring.

use super::{Ring, RingElem};
use crate::error::{Error, Result};

struct Parser<'a> {
    ring: &'a Ring,
    chars: Vec<char>,
    pos: usize,
}

pub fn parse_elem(ring: &Ring, s: &str) -> Result<RingElem> {
    let mut p = Parser { ring, chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let e = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!("unexpected `{}` in `{s}`", p.chars[p.pos])));
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RingElem> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let inv = d.try_inverse().ok_or_else(|| Error::NotUnit(d.to_string()))?;
                    acc = &acc * &inv;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElem> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.integer()?;
            let n = if neg { -n } else { n };
            return base.pow_i(n);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("expected integer at position {start}")))
    }

    fn atom(&mut self) -> Result<RingElem> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RingElem::constant(self.ring, n))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let i = self
                    .ring
                    .var_index(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` in {}", self.ring)))?;
                Ok(RingElem::var(self.ring, i))
            }
            other => Err(Error::Parse(format!("unexpected {other:?} at position {}", self.pos))),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::ring::{Modulus, Ring, Var};

    #[test]
    fn parses_and_prints() {
        let r = Ring::polynomial(vec![Var::ordinary("x"), Var::log("y")], Modulus::new(5, 2).unwrap()).unwrap();
        let e = r.el("x^2 - 3*x*y + 7");
        assert_eq!(e.to_string(), "x^2 - 3*x*y + 7");
        assert_eq!(r.el("-(x + 1)^2"), r.el("-x^2 - 2*x - 1"));
        assert!(r.parse("z").is_err());
        assert!(r.parse("1/x").is_err());
        assert!(r.parse("(x").is_err());
    }
}
