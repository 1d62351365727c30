//! Recursive-descent parser for the symbol grammar.
//!
//! ```text
//! expr    := "z" | "const(" cplx ")" | "sigma(" cplx ")"
//!          | "mobius(" cplx "," cplx "," cplx "," cplx ")"
//!          | "blaschke(" list [";" cplx] ")" | "poly(" list ")"
//!          | "scale(" cplx "," expr ")" | "compose(" expr "," expr ")"
//!          | "pow(" expr "," uint ")"
//! list    := "[" [cplx ("," cplx)*] "]"
//! cplx    := real [("+"|"-") [number] "i"] | [sign] [number] "i"
//! ```
//!
//! Whitespace is allowed between tokens. Literals must be finite.

use num_complex::Complex64;

use super::expr::{SymbolExpr, MAX_POWER, UNIMODULAR_TOL};
use crate::disk::DiskPoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Nesting bound; keeps hostile input from exhausting the stack.
const MAX_DEPTH: usize = 256;

pub fn parse_symbol(text: &str) -> Result<SymbolExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a standalone complex literal such as `0.5`, `1-2i` or `-i`.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let c = p.complex()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(c)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: msg.into() }
    }

    fn err_at(&self, position: usize, msg: impl Into<String>) -> ParseError {
        ParseError { position, message: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        self.ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", b as char)))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        // Only ASCII letters were consumed, so this slice is valid UTF-8.
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn expr(&mut self) -> Result<SymbolExpr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nested too deeply"));
        }
        let e = self.expr_inner();
        self.depth -= 1;
        e
    }

    fn expr_inner(&mut self) -> Result<SymbolExpr, ParseError> {
        self.ws();
        let start = self.pos;
        let name = self.ident();
        if name == "z" {
            return Ok(SymbolExpr::Identity);
        }
        if name.is_empty() {
            return Err(self.err("expected a symbol expression"));
        }
        self.expect(b'(')?;
        let e = match name {
            "const" => {
                let at = self.pos;
                let c = self.complex()?;
                if c.norm() > 1.0 {
                    return Err(self.err_at(at, "const value must satisfy |c| <= 1"));
                }
                SymbolExpr::Const(c)
            }
            "sigma" => SymbolExpr::Sigma(self.disk_point()?),
            "mobius" => {
                let a = self.complex()?;
                self.expect(b',')?;
                let b = self.complex()?;
                self.expect(b',')?;
                let c = self.complex()?;
                self.expect(b',')?;
                let d = self.complex()?;
                SymbolExpr::Mobius { a, b, c, d }
            }
            "blaschke" => {
                self.expect(b'[')?;
                let mut zeros = Vec::new();
                if !self.eat(b']') {
                    loop {
                        zeros.push(self.disk_point()?);
                        if self.eat(b']') {
                            break;
                        }
                        self.expect(b',')?;
                    }
                }
                let unimodular = if self.eat(b';') {
                    let at = self.pos;
                    let u = self.complex()?;
                    if (u.norm() - 1.0).abs() > UNIMODULAR_TOL {
                        return Err(self.err_at(at, "blaschke factor must be unimodular"));
                    }
                    u
                } else {
                    Complex64::new(1.0, 0.0)
                };
                SymbolExpr::Blaschke { zeros, unimodular }
            }
            "poly" => {
                let cs = self.list()?;
                if cs.is_empty() {
                    return Err(self.err("poly needs at least one coefficient"));
                }
                SymbolExpr::Poly(cs)
            }
            "scale" => {
                let r = self.complex()?;
                self.expect(b',')?;
                SymbolExpr::Scale(r, Box::new(self.expr()?))
            }
            "compose" => {
                let outer = self.expr()?;
                self.expect(b',')?;
                let inner = self.expr()?;
                SymbolExpr::Compose(Box::new(outer), Box::new(inner))
            }
            "pow" => {
                let child = self.expr()?;
                self.expect(b',')?;
                let n = self.uint()?;
                SymbolExpr::Pow(Box::new(child), n)
            }
            other => return Err(self.err_at(start, format!("unknown symbol constructor '{other}'"))),
        };
        self.expect(b')')?;
        Ok(e)
    }

    fn list(&mut self) -> Result<Vec<Complex64>, ParseError> {
        self.expect(b'[')?;
        let mut out = Vec::new();
        if self.eat(b']') {
            return Ok(out);
        }
        loop {
            out.push(self.complex()?);
            if self.eat(b']') {
                return Ok(out);
            }
            self.expect(b',')?;
        }
    }

    fn disk_point(&mut self) -> Result<DiskPoint, ParseError> {
        self.ws();
        let at = self.pos;
        let c = self.complex()?;
        DiskPoint::new(c).map_err(|_| self.err_at(at, "point must lie in the open unit disk"))
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let n: u64 = digits.parse().map_err(|_| self.err_at(start, "expected a positive integer exponent"))?;
        if n == 0 || n > MAX_POWER as u64 {
            return Err(self.err_at(start, format!("exponent must be in 1..={MAX_POWER}")));
        }
        Ok(n as u32)
    }

    /// Scans an unsigned decimal number; returns `None` if none starts here.
    fn number(&mut self) -> Result<Option<f64>, ParseError> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        let int_start = i;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        let mut mantissa_digits = i - int_start;
        if i < s.len() && s[i] == b'.' {
            i += 1;
            let frac_start = i;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
            mantissa_digits += i - frac_start;
        }
        if mantissa_digits == 0 {
            return Ok(None);
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < s.len() && s[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| self.err_at(start, "malformed number"))?;
        if !v.is_finite() {
            return Err(self.err_at(start, "number out of range"));
        }
        self.pos = i;
        Ok(Some(v))
    }

    fn sign(&mut self) -> Option<f64> {
        self.ws();
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1.0)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        self.ws();
        let start = self.pos;
        let s1 = self.sign().unwrap_or(1.0);
        self.ws();
        let first = self.number()?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(Complex64::new(0.0, s1 * first.unwrap_or(1.0)));
        }
        let re = match first {
            Some(v) => s1 * v,
            None => return Err(self.err_at(start, "expected a complex literal")),
        };
        let save = self.pos;
        match self.sign() {
            Some(s2) => {
                self.ws();
                let mag = self.number()?;
                if self.peek() == Some(b'i') {
                    self.pos += 1;
                    Ok(Complex64::new(re, s2 * mag.unwrap_or(1.0)))
                } else {
                    Err(self.err("expected 'i' after imaginary part"))
                }
            }
            None => {
                self.pos = save;
                Ok(Complex64::new(re, 0.0))
            }
        }
    }
}
