//! A small infix expression language used for fixtures and CLI input.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := rational | name | '(' expr ')'
//! ```

use std::sync::Arc;

use num_traits::Zero;

use super::poly::{Polynomial, VariableRegistry};
use super::{parse_rational, LocalizedElement, MasterRing, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` at offset {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let e: i64 = n.parse().map_err(|_| Error::Parse(format!("exponent `{n}` out of range")))?;
                Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
            }
            _ => Err(Error::Parse("expected integer exponent after `^`".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(parse_rational(&n).expect("digits")))
            }
            Some(Tok::Name(s)) => {
                self.pos += 1;
                Ok(Expr::Var(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

impl Expr {
    /// Evaluates in the master ring. Names are chart variables or `w<k>`
    /// (the inverse of minor `k`); division requires a unit divisor.
    pub fn eval_in(&self, ring: &Arc<MasterRing>) -> Result<LocalizedElement> {
        Ok(match self {
            Expr::Num(c) => ring.constant(c.clone()),
            Expr::Var(name) => {
                if let Some(x) = ring.var_named(name) {
                    x
                } else if let Some(id) = ring.minor_id_by_name(name) {
                    ring.minor_inverse(id)
                } else {
                    return Err(Error::Parse(format!("unknown variable `{name}`")));
                }
            }
            Expr::Neg(a) => -a.eval_in(ring)?,
            Expr::Add(a, b) => a.eval_in(ring)?.checked_add(&b.eval_in(ring)?)?,
            Expr::Sub(a, b) => a.eval_in(ring)?.checked_sub(&b.eval_in(ring)?)?,
            Expr::Mul(a, b) => a.eval_in(ring)?.checked_mul(&b.eval_in(ring)?)?,
            Expr::Div(a, b) => a.eval_in(ring)?.checked_div(&b.eval_in(ring)?)?,
            Expr::Pow(a, e) => a.eval_in(ring)?.powi(*e)?,
        })
    }

    /// Evaluates as a polynomial over `reg`; only constant divisors allowed.
    pub fn eval_poly(&self, reg: &Arc<VariableRegistry>) -> Result<Polynomial> {
        Ok(match self {
            Expr::Num(c) => Polynomial::constant(reg, c.clone()),
            Expr::Var(name) => match reg.index_of(name) {
                Some(v) => Polynomial::var(reg, v),
                None => return Err(Error::Parse(format!("unknown variable `{name}`"))),
            },
            Expr::Neg(a) => -a.eval_poly(reg)?,
            Expr::Add(a, b) => a.eval_poly(reg)?.checked_add(&b.eval_poly(reg)?)?,
            Expr::Sub(a, b) => a.eval_poly(reg)?.checked_sub(&b.eval_poly(reg)?)?,
            Expr::Mul(a, b) => a.eval_poly(reg)?.checked_mul(&b.eval_poly(reg)?)?,
            Expr::Div(a, b) => {
                let d = b.eval_poly(reg)?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => a.eval_poly(reg)?.scale(&(Rational::from_integer(1.into()) / c)),
                    Some(_) => return Err(Error::DivisionByZero),
                    None => return Err(Error::InvalidInput("polynomial division by a non-constant".into())),
                }
            }
            Expr::Pow(a, e) => {
                if *e < 0 {
                    return Err(Error::InvalidInput("negative exponent in a polynomial".into()));
                }
                a.eval_poly(reg)?.pow(*e as u32)
            }
        })
    }
}
