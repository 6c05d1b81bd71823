//! Recursive-descent reader for the canonical text form (and a little more:
//! parentheses, `^`, division by rational constants).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::polynomial::{Polynomial, Ring};
use super::Scalar;
use crate::error::{Error, Result};

pub(crate) fn parse(ring: &Arc<Ring>, text: &str) -> Result<Polynomial> {
    let mut p = Parser {
        ring,
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
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

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    let c = d
                        .constant_value()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| self.err("division by a non-constant or zero"))?;
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Polynomial::constant(self.ring, Scalar::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Polynomial::var(self.ring, name)
            }
            _ => Err(self.err("unexpected token")),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("bad integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let r = Ring::new(["x_1", "x_0", "y_1", "y_0", "T"]);
        let s = "30*x_1 - 30*x_0 - T*y_1 - T*y_0";
        assert_eq!(parse(&r, s).unwrap().to_text(), s);
    }

    #[test]
    fn errors() {
        let r = Ring::new(["x"]);
        assert!(parse(&r, "x +").is_err());
        assert!(parse(&r, "x / x").is_err());
        assert!(matches!(parse(&r, "z"), Err(Error::UnknownVariable(_))));
        assert!(parse(&r, "(x").is_err());
    }

    #[test]
    fn precedence() {
        let r = Ring::new(["x", "y"]);
        let p = parse(&r, "-(x + y)^2/2 + 3/4").unwrap();
        assert_eq!(p.to_text(), "-1/2*x^2 - x*y - 1/2*y^2 + 3/4");
    }
}
