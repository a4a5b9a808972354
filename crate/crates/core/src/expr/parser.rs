//! Recursive-descent parser for rational-function expressions.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := unary { ("*" | "/") unary }
//! unary  := ["-"] factor
//! factor := base ["^" ["-"] integer]
//! base   := integer | "i" | "x" | "z" | "(" expr ")"
//! ```
//!
//! `a/b` is accepted only when `b` is a constant times a product of powers
//! of declared factors; a negative exponent likewise requires an invertible
//! base.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{BiPoly, Den, FactorBasis, Gq, RatFun, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared denominator factor at byte {pos}: `{divisor}`")]
    UndeclaredFactor { pos: usize, divisor: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(char),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        if c.is_ascii_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < bytes.len() && bytes[k].is_ascii_digit() {
                k += 1;
            }
            let n: BigInt = text[start..k].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if matches!(c, 'x' | 'z' | 'i') {
            out.push((k, Tok::Ident(c)));
            k += 1;
        } else if matches!(c, '+' | '-' | '*' | '/' | '^' | '(' | ')') {
            out.push((k, Tok::Op(c)));
            k += 1;
        } else {
            return Err(ParseError::Syntax { pos: k, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    text: &'a str,
    basis: &'a FactorBasis,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<RatFun, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat_op('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFun, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let start = self.offset();
                self.pos += 1;
                let divisor_start = self.offset();
                let d = self.unary()?;
                let divisor_end = self.offset();
                let inv = self.invert(&d, start, &self.text[divisor_start..divisor_end.min(self.text.len())])?;
                acc = acc.mul(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFun, ParseError> {
        if self.eat_op('-') {
            Ok(self.factor()?.neg())
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<RatFun, ParseError> {
        let start = self.offset();
        let base = self.base()?;
        let base_text_end = self.offset();
        if !self.eat_op('^') {
            return Ok(base);
        }
        let negative = self.eat_op('-');
        let e = match self.peek() {
            Some(Tok::Int(n)) => {
                let e: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                    pos: self.offset(),
                    msg: "exponent too large".into(),
                })?;
                self.pos += 1;
                e
            }
            _ => return self.err("expected integer exponent"),
        };
        let p = base.pow(e);
        if negative {
            let text = &self.text[start..base_text_end.min(self.text.len())];
            self.invert(&p, start, text)
        } else {
            Ok(p)
        }
    }

    fn base(&mut self) -> Result<RatFun, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(RatFun::constant(Gq::from_real(BigRational::from_integer(n))))
            }
            Some(Tok::Ident('x')) => {
                self.pos += 1;
                Ok(RatFun::var(Var::X))
            }
            Some(Tok::Ident('z')) => {
                self.pos += 1;
                Ok(RatFun::var(Var::Z))
            }
            Some(Tok::Ident(_)) => {
                self.pos += 1;
                Ok(RatFun::constant(Gq::i()))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.err("expected a number, `i`, `x`, `z` or `(`"),
            None => self.err("unexpected end of input"),
        }
    }

    /// `1/d`, provided the numerator of `d` factors over the basis.
    fn invert(&self, d: &RatFun, pos: usize, text: &str) -> Result<RatFun, ParseError> {
        let undeclared = || ParseError::UndeclaredFactor { pos, divisor: text.trim().to_string() };
        if d.is_zero() {
            return Err(ParseError::Syntax { pos, msg: "division by zero".into() });
        }
        let (c, exps) = factorize_bipoly(self.basis, d.num()).ok_or_else(undeclared)?;
        let mut inv = RatFun::new(d.den_expanded(), exps);
        inv = inv.scale(&c.inv().map_err(|_| undeclared())?);
        Ok(inv)
    }
}

/// `p = c · Π f^k` over all registered factors (either variable).
pub fn factorize_bipoly(basis: &FactorBasis, p: &BiPoly) -> Option<(Gq, Den)> {
    if p.is_zero() {
        return None;
    }
    let mut rest = p.clone();
    let mut exps = Den::new();
    for f in basis.factors() {
        while let Some(q) = rest.div_exact_uni(f.poly(), f.var()) {
            *exps.entry(f.clone()).or_insert(0) += 1;
            rest = q;
        }
    }
    rest.constant_term().map(|c| (c, exps))
}

/// Parses one expression against a factor basis.
pub fn parse_expr(text: &str, basis: &FactorBasis) -> Result<RatFun, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), text, basis };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Factor;

    fn basis() -> FactorBasis {
        FactorBasis::new(vec![
            Factor::linear(Var::X, Gq::zero()),
            Factor::linear(Var::X, Gq::from_int(2)),
            Factor::linear(Var::Z, Gq::zero()),
        ])
        .unwrap()
    }

    #[test]
    fn example_entry() {
        let b = basis();
        let v = parse_expr("(x*z-1)/x", &b).unwrap();
        let expected = RatFun::var(Var::Z).sub(&RatFun::inv_factor(&b.factors()[0], 1));
        assert_eq!(v, expected);
    }

    #[test]
    fn zero() {
        assert!(parse_expr("0", &basis()).unwrap().is_zero());
    }

    #[test]
    fn product_denominator() {
        let b = basis();
        let v = parse_expr("1/(x^2*(x-2))", &b).unwrap();
        assert_eq!(v.num(), &BiPoly::one());
        assert_eq!(v.den()[&b.factors()[0]], 2);
        assert_eq!(v.den()[&b.factors()[1]], 1);
        // re-expansion: v * x^2 (x-2) = 1
        let back = v.mul_poly(&parse_expr("x^3-2*x^2", &b).unwrap().num().clone());
        assert_eq!(back, RatFun::one());
    }

    #[test]
    fn constants_go_to_numerator() {
        let b = basis();
        let v = parse_expr("3/(2*x)", &b).unwrap();
        assert_eq!(v, parse_expr("3/2*x^-1", &b).unwrap());
        assert_eq!(v.to_string(), "3/2/x");
    }

    #[test]
    fn errors_carry_positions() {
        let b = basis();
        match parse_expr("1/(x-1)", &b) {
            Err(ParseError::UndeclaredFactor { divisor, .. }) => assert_eq!(divisor, "(x-1)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("x+", &b), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("x $", &b), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("(x", &b), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("x^y", &b), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn imaginary_unit() {
        let b = basis();
        let v = parse_expr("4*i*z", &b).unwrap();
        assert_eq!(v.num().coeff((0, 1)), Gq::new(BigRational::default(), BigRational::from_integer(4.into())));
        let sq = parse_expr("i^2", &b).unwrap();
        assert_eq!(sq, RatFun::constant(Gq::from_int(-1)));
    }
}
