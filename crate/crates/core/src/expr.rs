//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: integers, variables, `+ - *`, `^` with integer exponents, and
//! parentheses. In chain templates a single named parameter may appear in
//! exponents, as `t`, `t+k` or `t-k`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{PolyRing, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Const(u32),
    Param,
    ParamPlus(u32),
    ParamMinus(u32),
}

impl Exponent {
    fn eval(&self, t: Option<u32>) -> Result<u32> {
        let t = match self {
            Exponent::Const(k) => return Ok(*k),
            _ => t.ok_or_else(|| Error::Invalid("parameter used outside a chain template".into()))?,
        };
        match self {
            Exponent::Const(_) => unreachable!(),
            Exponent::Param => Ok(t),
            Exponent::ParamPlus(k) => t
                .checked_add(*k)
                .ok_or_else(|| Error::ExponentOverflow("t+k exceeds 32 bits".into())),
            Exponent::ParamMinus(k) => Ok(t.saturating_sub(*k)),
        }
    }

    pub fn render(&self, param: &str) -> String {
        match self {
            Exponent::Const(k) => k.to_string(),
            Exponent::Param => param.to_string(),
            Exponent::ParamPlus(k) => format!("{}+{}", param, k),
            Exponent::ParamMinus(k) => format!("{}-{}", param, k),
        }
    }
}

/// Expression AST. Retained for chain templates; plain polynomials are
/// evaluated immediately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
}

impl Expr {
    pub fn eval(&self, ring: &Arc<PolyRing>, t: Option<u32>) -> Result<Polynomial> {
        match self {
            Expr::Int(v) => Ok(Polynomial::constant(ring.clone(), ring.field.reduce_u64(*v))),
            Expr::Var(i) => Ok(Polynomial::variable(ring.clone(), *i)),
            Expr::Neg(e) => Ok(e.eval(ring, t)?.neg()),
            Expr::Add(a, b) => a.eval(ring, t)?.add(&b.eval(ring, t)?),
            Expr::Sub(a, b) => a.eval(ring, t)?.sub(&b.eval(ring, t)?),
            Expr::Mul(a, b) => a.eval(ring, t)?.mul(&b.eval(ring, t)?),
            Expr::Pow(a, e) => a.eval(ring, t)?.pow(e.eval(t)?),
        }
    }

    pub fn render(&self, ring: &PolyRing, param: &str) -> String {
        match self {
            Expr::Int(v) => v.to_string(),
            Expr::Var(i) => ring.vars[*i].clone(),
            Expr::Neg(e) => format!("-{}", e.render_atom(ring, param)),
            Expr::Add(a, b) => format!("{} + {}", a.render(ring, param), b.render(ring, param)),
            Expr::Sub(a, b) => format!("{} - {}", a.render(ring, param), b.render_atom(ring, param)),
            Expr::Mul(a, b) => {
                format!("{}*{}", a.render_atom(ring, param), b.render_atom(ring, param))
            }
            Expr::Pow(a, e) => format!("{}^({})", a.render_atom(ring, param), e.render(param)),
        }
    }

    fn render_atom(&self, ring: &PolyRing, param: &str) -> String {
        match self {
            Expr::Int(_) | Expr::Var(_) | Expr::Pow(..) => self.render(ring, param),
            _ => format!("({})", self.render(ring, param)),
        }
    }
}

pub struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
    ring: &'a Arc<PolyRing>,
    /// Name of the chain parameter, when parsing a template.
    param: Option<&'a str>,
}

impl<'a> Parser<'a> {
    pub fn new(ring: &'a Arc<PolyRing>, src: &'a str, param: Option<&'a str>) -> Self {
        Parser { src: src.as_bytes(), pos: 0, line: 1, line_start: 0, ring, param }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::ParseError { line: self.line, col: self.pos - self.line_start + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'\n' => {
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are ascii")
            .parse::<u64>()
            .map_err(|_| self.err("integer literal too large"))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            Some(String::from_utf8(self.src[start..self.pos].to_vec()).expect("ascii ident"))
        }
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Exponent> {
        let parenthesized = self.eat(b'(');
        let e = match self.peek() {
            Some(c) if c.is_ascii_digit() => Exponent::Const(self.small_int()?),
            _ => {
                let name = self.ident().ok_or_else(|| self.err("expected exponent"))?;
                if Some(name.as_str()) != self.param {
                    return Err(self.err(format!("unknown exponent symbol `{}`", name)));
                }
                if self.eat(b'+') {
                    Exponent::ParamPlus(self.small_int()?)
                } else if self.eat(b'-') {
                    Exponent::ParamMinus(self.small_int()?)
                } else {
                    Exponent::Param
                }
            }
        };
        if parenthesized && !self.eat(b')') {
            return Err(self.err("expected `)` after exponent"));
        }
        Ok(e)
    }

    fn small_int(&mut self) -> Result<u32> {
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| self.err("exponent too large for 32 bits"))
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(_) => {
                let name = self.ident().ok_or_else(|| self.err("expected a variable or number"))?;
                if Some(name.as_str()) == self.param {
                    return Err(self.err(format!(
                        "chain parameter `{}` may only appear in exponents",
                        name
                    )));
                }
                match self.ring.var_index(&name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(Error::UnknownVariable(name)),
                }
            }
            None => Err(self.err("unexpected end of expression")),
        }
    }

    pub fn finish(&mut self) -> Result<()> {
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected character `{}`", c as char)));
        }
        Ok(())
    }
}

/// Parses one polynomial expression over the given ring.
pub fn parse_poly(ring: &Arc<PolyRing>, src: &str) -> Result<Polynomial> {
    let expr = parse_expr(ring, src, None)?;
    expr.eval(ring, None)
}

/// Parses an expression, optionally allowing a chain parameter in exponents.
pub fn parse_expr(ring: &Arc<PolyRing>, src: &str, param: Option<&str>) -> Result<Expr> {
    let mut p = Parser::new(ring, src, param);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a comma-separated list of polynomial expressions.
pub fn parse_poly_list(ring: &Arc<PolyRing>, src: &str) -> Result<Vec<Polynomial>> {
    src.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_poly(ring, s))
        .collect()
}
