//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' ['-'] integer)?
//! base   := integer | 'x' | 'y'I'_'R | ident | '(' expr ')'
//! ```
//!
//! Jet variables `yI_R` require `1 <= I <= m` and `0 <= R <= order`; other
//! identifiers parse as auxiliary symbols.

use super::{Expr, ExprError, Poly};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("parse error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("jet variable y{comp}_{ord} out of range at byte {pos} (m = {m}, max order = {max_ord})")]
    JetOutOfRange { pos: usize, comp: u32, ord: u32, m: u32, max_ord: u32 },
    #[error("arithmetic error at byte {pos}: {source}")]
    Arithmetic { pos: usize, source: ExprError },
}

/// Jet bounds for the parse: component in `1..=m`, order in `0..=max_ord`.
#[derive(Clone, Copy, Debug)]
pub struct ParseCtx {
    pub m: u32,
    pub max_ord: u32,
}

pub fn parse_expr(text: &str, m: u32, max_ord: u32) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        ctx: ParseCtx { m, max_ord },
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ctx: ParseCtx,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let negate = self.eat(b'-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    acc = acc
                        .div(&f)
                        .map_err(|source| ParseError::Arithmetic { pos: at, source })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let neg = self.eat(b'-');
            let e = self.integer()? as i64;
            let e = if neg { -e } else { e };
            base.pow(e)
                .map_err(|source| ParseError::Arithmetic { pos: at, source })
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::from_poly(Poly::from_int(n.into())))
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected a number, variable, or '('")),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| ParseError::Syntax { pos: start, msg: "integer too large".to_string() })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        if name == "x" {
            return Ok(Expr::x());
        }
        if let Some((comp, ord)) = split_jet(name) {
            if comp < 1 || comp > self.ctx.m || ord > self.ctx.max_ord {
                return Err(ParseError::JetOutOfRange {
                    pos: start,
                    comp,
                    ord,
                    m: self.ctx.m,
                    max_ord: self.ctx.max_ord,
                });
            }
            return Ok(Expr::jet(comp, ord));
        }
        if name.contains('_') {
            return Err(ParseError::Syntax {
                pos: start,
                msg: format!("'{name}' is not a jet variable; auxiliary names may not contain '_'"),
            });
        }
        Ok(Expr::aux(name))
    }
}

/// Split `y<digits>_<digits>` into (component, order).
fn split_jet(name: &str) -> Option<(u32, u32)> {
    let rest = name.strip_prefix('y')?;
    let (comp, ord) = rest.split_once('_')?;
    if comp.is_empty() || ord.is_empty() {
        return None;
    }
    if !comp.bytes().all(|b| b.is_ascii_digit()) || !ord.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((comp.parse().ok()?, ord.parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums_and_products() {
        let e = parse_expr("y1_2 + x*y1_0", 1, 2).unwrap();
        assert_eq!(e, Expr::jet(1, 2).add(&Expr::x().mul(&Expr::jet(1, 0))));
        assert_eq!(e.numerator().term_count(), 2);
    }

    #[test]
    fn parses_fractions_and_powers() {
        let e = parse_expr("(y2_1)^2 / 3", 2, 2).unwrap();
        let expected = Expr::jet(2, 1).pow(2).unwrap().scale(1, 3);
        assert_eq!(e, expected);
        let lit = parse_expr("-2/7", 1, 1).unwrap();
        assert_eq!(lit, Expr::from_ratio(-2, 7));
    }

    #[test]
    fn jet_out_of_range() {
        let err = parse_expr("y3_0", 2, 2).unwrap_err();
        match err {
            ParseError::JetOutOfRange { comp: 3, ord: 0, m: 2, .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_expr("x + ", 1, 1).unwrap_err();
        match err {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn aux_symbols_parse() {
        let e = parse_expr("a*x + b", 1, 1).unwrap();
        assert!(e.has_aux());
    }

    #[test]
    fn print_parse_roundtrip() {
        let samples = [
            "y1_2 + x*y1_0",
            "(y2_1)^2/3",
            "-2/7",
            "x^2 - 2*x + 1",
            "(x^2 + y1_0)/(x - 1)",
            "a*y1_1 - 3*b",
        ];
        for s in samples {
            let e = parse_expr(s, 2, 2).unwrap();
            let printed = e.to_string();
            let back = parse_expr(&printed, 2, 2).unwrap();
            assert_eq!(e, back, "roundtrip failed for {s} -> {printed}");
        }
    }
}
