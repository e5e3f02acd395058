//! Text grammar for polynomials and rational functions in `t`:
//! integers, `t`, `+ - * ^`, parentheses, and `/` for rational functions.

use thiserror::Error;

use super::fp::check_modulus;
use super::poly::Poly;
use super::ratfunc::RatFunc;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

const MAX_EXPONENT: u64 = 100_000;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    p: u32,
    allow_division: bool,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset, message: message.into() })
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

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    let at = self.pos;
                    if !self.allow_division {
                        return self.err(at, "division is not allowed in a polynomial");
                    }
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return self.err(at, "division by zero");
                    }
                    acc = &acc / &d;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            if !self.allow_division {
                return self.err(self.pos, "negative exponent in a polynomial");
            }
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let at = self.pos;
        let e = self.unsigned()?;
        if e > MAX_EXPONENT {
            return self.err(at, format!("exponent {e} exceeds {MAX_EXPONENT}"));
        }
        let e = if neg { -(e as i64) } else { e as i64 };
        base.pow(e).or_else(|_| self.err(at, "negative power of zero"))
    }

    fn unsigned(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let mut v: u64 = 0;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            v = v.saturating_mul(10).saturating_add((self.src[self.pos] - b'0') as u64);
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, "expected an integer");
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        let at = match self.peek() {
            None => return self.err(self.src.len(), "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.src[at];
        match c {
            b't' => {
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::t(self.p)))
            }
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err(self.pos, "expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            b'0'..=b'9' => {
                let mut v: u64 = 0;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    v = (v * 10 + (self.src[self.pos] - b'0') as u64) % self.p as u64;
                    self.pos += 1;
                }
                Ok(RatFunc::constant(self.p, v as i64))
            }
            _ => {
                let ch = std::str::from_utf8(&self.src[at..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
                self.err(at, format!("unexpected character '{ch}'"))
            }
        }
    }
}

fn run(src: &str, p: u32, allow_division: bool) -> Result<RatFunc, ParseError> {
    if check_modulus(p).is_err() {
        return Err(ParseError { offset: 0, message: format!("modulus {p} is not prime") });
    }
    let mut parser = Parser { src: src.as_bytes(), pos: 0, p, allow_division };
    if parser.peek().is_none() {
        return parser.err(src.len(), "empty expression");
    }
    let v = parser.expr()?;
    if let Some(c) = parser.peek() {
        let at = parser.pos;
        return parser.err(at, format!("unexpected character '{}'", c as char));
    }
    Ok(v)
}

pub fn parse_poly(src: &str, p: u32) -> Result<Poly, ParseError> {
    let v = run(src, p, false)?;
    Ok(v.num().clone())
}

pub fn parse_ratfunc(src: &str, p: u32) -> Result<RatFunc, ParseError> {
    run(src, p, true)
}
