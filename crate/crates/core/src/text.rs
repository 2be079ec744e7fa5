//! Shared text grammar for field elements (symbol `t`) and polynomials
//! (symbol `x`).
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := int | sym ('^' int)? | '(' expr ')'
//! sym    := 'x' | 't'
//! ```
//!
//! Whitespace is ignored and repeated monomials are summed. The parser
//! produces a bivariate polynomial with coefficients mod `p`, keyed by
//! `(x exponent, t exponent)`; callers reduce the `t` part in the field.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest exponent accepted in text input.
pub(crate) const MAX_EXPONENT: u32 = 1 << 20;

pub(crate) type Bivariate = BTreeMap<(u32, u32), u64>;

pub(crate) fn parse_bivariate(input: &str, p: u64, allow_x: bool, allow_t: bool) -> Result<Bivariate> {
    let mut parser = Parser {
        bytes: input.as_bytes(),
        pos: 0,
        p,
        allow_x,
        allow_t,
    };
    parser.skip_ws();
    if parser.pos == parser.bytes.len() {
        return Err(Error::parse(0, "empty expression"));
    }
    let out = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(Error::parse(parser.pos, "unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    p: u64,
    allow_x: bool,
    allow_t: bool,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Bivariate> {
        let mut acc = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.term()?;
            add_into(&mut acc, &rhs, self.p);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Bivariate> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = mul(&acc, &rhs, self.p);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Bivariate> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::parse(self.pos, "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let value = self.integer()?;
                let mut out = Bivariate::new();
                let c = (value % self.p as u128) as u64;
                if c != 0 {
                    out.insert((0, 0), c);
                }
                Ok(out)
            }
            Some(sym @ (b'x' | b't')) => {
                if (sym == b'x' && !self.allow_x) || (sym == b't' && !self.allow_t) {
                    return Err(Error::parse(
                        self.pos,
                        format!("symbol '{}' not allowed here", sym as char),
                    ));
                }
                self.pos += 1;
                let mut exp = 1u32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let e = self.integer()?;
                    if e > MAX_EXPONENT as u128 {
                        return Err(Error::parse(at, "exponent too large"));
                    }
                    exp = e as u32;
                }
                let key = if sym == b'x' { (exp, 0) } else { (0, exp) };
                Ok(Bivariate::from([(key, 1 % self.p)]))
            }
            Some(_) => Err(Error::parse(self.pos, "expected a number, 'x', 't' or '('")),
            None => Err(Error::parse(start.max(self.pos), "unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<u128> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u128>().ok())
            .ok_or_else(|| Error::parse(start, "integer out of range"))
    }
}

fn add_into(acc: &mut Bivariate, rhs: &Bivariate, p: u64) {
    for (&key, &c) in rhs {
        let entry = acc.entry(key).or_insert(0);
        *entry = (*entry + c) % p;
        if *entry == 0 {
            acc.remove(&key);
        }
    }
}

fn mul(a: &Bivariate, b: &Bivariate, p: u64) -> Bivariate {
    let mut out = Bivariate::new();
    for (&(ax, at), &ac) in a {
        for (&(bx, bt), &bc) in b {
            let key = (ax.saturating_add(bx), at.saturating_add(bt));
            let entry = out.entry(key).or_insert(0);
            *entry = (*entry + ac * bc % p) % p;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_repeated_monomials() {
        let b = parse_bivariate("x + x + x", 3, true, false).unwrap();
        assert!(b.is_empty());
        let b = parse_bivariate("2*x^3 + 1", 5, true, false).unwrap();
        assert_eq!(b, Bivariate::from([((3, 0), 2), ((0, 0), 1)]));
    }

    #[test]
    fn parenthesized_coefficients() {
        let b = parse_bivariate("(t+1)*x^2+t", 2, true, true).unwrap();
        assert_eq!(
            b,
            Bivariate::from([((2, 1), 1), ((2, 0), 1), ((0, 1), 1)])
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            parse_bivariate("x^", 2, true, false),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_bivariate("x + y", 2, true, false),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(parse_bivariate("t", 2, true, false).is_err());
        assert!(parse_bivariate("", 2, true, false).is_err());
        assert!(parse_bivariate("(x+1", 2, true, false).is_err());
    }
}
