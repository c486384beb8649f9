//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*    divisors must be nonzero constants
//! factor := base ('^' nat)?
//! base   := integer | variable | '(' expr ')'
//! ```

use std::sync::Arc;

use num_bigint::BigInt;

use super::{MultiPoly, PolyError};
use crate::field::Field;

pub fn parse_polynomial<F: Field>(field: F, vars: Arc<[String]>, text: &str) -> Result<MultiPoly<F>, PolyError> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, field, vars, len: text.len() };
    let out = p.expr()?;
    p.skip_ws();
    if let Some(&(at, c)) = p.chars.get(p.pos) {
        return Err(PolyError::Syntax { pos: at, message: format!("unexpected '{c}'") });
    }
    Ok(out)
}

struct Parser<F: Field> {
    chars: Vec<(usize, char)>,
    pos: usize,
    field: F,
    vars: Arc<[String]>,
    len: usize,
}

impl<F: Field> Parser<F> {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn expr(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let negate = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let mut acc = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            let at = self.offset();
            self.pos += 1;
            let f = self.factor()?;
            if op == '*' {
                acc = &acc * &f;
                continue;
            }
            let c = match (f.len(), f.total_degree()) {
                (1, Some(0)) => f.terms().next().map(|(_, c)| c.clone()),
                _ => None,
            };
            let inv = c
                .and_then(|c| self.field.inv(&c))
                .ok_or_else(|| PolyError::Syntax { pos: at, message: "divisor must be a nonzero constant".into() })?;
            acc = acc.scale(&inv);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let base = self.base()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.offset();
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(PolyError::BadExponent { pos: at });
            }
            let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
            let e: u32 = digits
                .parse()
                .ok()
                .filter(|&e: &u32| e <= u16::MAX as u32)
                .ok_or(PolyError::BadExponent { pos: at })?;
            return base.pow(e).map_err(|_| PolyError::BadExponent { pos: at });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly<F>, PolyError> {
        let at = {
            self.skip_ws();
            self.offset()
        };
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(PolyError::Syntax { pos: self.offset(), message: "expected ')'".into() });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                let v: BigInt = digits.parse().expect("digits");
                let c = self.field.from_bigint(&v);
                Ok(MultiPoly::constant(self.field.clone(), self.vars.clone(), c))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_alphanumeric() || *c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                let i =
                    self.vars.iter().position(|v| *v == name).ok_or(PolyError::UnknownVariable { name, pos: at })?;
                Ok(MultiPoly::var(self.field.clone(), self.vars.clone(), i))
            }
            Some(c) => Err(PolyError::Syntax { pos: at, message: format!("unexpected '{c}'") }),
            None => Err(PolyError::Syntax { pos: at, message: "unexpected end of input".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    fn vars() -> Arc<[String]> {
        vec!["t1".to_string(), "t2".to_string()].into()
    }

    #[test]
    fn precedence_and_parentheses() {
        let a = parse_polynomial(Rationals, vars(), "t1*(t1^2 + t2^2)").unwrap();
        let b = parse_polynomial(Rationals, vars(), "t1^3 + t1*t2^2").unwrap();
        assert_eq!(a, b);
        let c = parse_polynomial(Rationals, vars(), "-t1 - 2*t2 + 3").unwrap();
        assert_eq!(c.to_string(), "-t1 - 2*t2 + 3");
        let d = parse_polynomial(Rationals, vars(), "2^3*t1").unwrap();
        assert_eq!(d.to_string(), "8*t1");
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_polynomial(Rationals, vars(), "t1 + t3"),
            Err(PolyError::UnknownVariable { name: "t3".into(), pos: 5 })
        );
        assert_eq!(parse_polynomial(Rationals, vars(), "t1^-1"), Err(PolyError::BadExponent { pos: 3 }));
        assert_eq!(parse_polynomial(Rationals, vars(), "t1^x"), Err(PolyError::BadExponent { pos: 3 }));
        assert!(matches!(parse_polynomial(Rationals, vars(), "(t1 + t2"), Err(PolyError::Syntax { pos: 8, .. })));
        assert!(matches!(parse_polynomial(Rationals, vars(), "t1 t2"), Err(PolyError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_polynomial(Rationals, vars(), ""), Err(PolyError::Syntax { pos: 0, .. })));
    }

    #[test]
    fn constant_divisors() {
        let a = parse_polynomial(Rationals, vars(), "7/2*t1^3 - t2/3").unwrap();
        assert_eq!(a.to_string(), "7/2*t1^3 - 1/3*t2");
        assert_eq!(parse_polynomial(Rationals, vars(), &a.to_string()).unwrap(), a);
        assert!(matches!(parse_polynomial(Rationals, vars(), "t1/t2"), Err(PolyError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_polynomial(Rationals, vars(), "t1/(2-2)"), Err(PolyError::Syntax { pos: 2, .. })));
    }
}
