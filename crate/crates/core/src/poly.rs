//! Sparse multivariate polynomials over a prime field.
//!
//! A polynomial is a list of `(coefficient, monomial)` terms kept strictly
//! descending under the ring's monomial order, with no zero coefficients.
//! The zero polynomial has an empty term list. All values are immutable
//! after construction and freely shareable across threads.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::monomial::{Monomial, MonomialOrder, OrderKind};

/// The ambient polynomial ring S = F_p[x_1, ..., x_n] with a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    pub field: PrimeField,
    pub vars: Vec<String>,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: PrimeField, vars: Vec<String>, order: MonomialOrder) -> Result<Arc<Self>> {
        if vars.is_empty() {
            return Err(Error::Invalid("a polynomial ring needs at least one variable".into()));
        }
        let mut seen = vars.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != vars.len() {
            return Err(Error::Invalid("variable names must be unique".into()));
        }
        Ok(Arc::new(PolyRing { field, vars, order }))
    }

    pub fn grevlex(p: u64, vars: &[&str]) -> Result<Arc<Self>> {
        let field = PrimeField::new(p)?;
        let order = MonomialOrder::grevlex(vars.len());
        PolyRing::new(field, vars.iter().map(|s| s.to_string()).collect(), order)
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Ring with the same field/variables under a different order.
    pub fn with_order(&self, order: MonomialOrder) -> Arc<PolyRing> {
        Arc::new(PolyRing { field: self.field, vars: self.vars.clone(), order })
    }

    /// Extends the ring with a fresh tag variable in front, under a block
    /// order that eliminates it.
    pub fn with_tag_variable(&self) -> Arc<PolyRing> {
        let mut vars = Vec::with_capacity(self.arity() + 1);
        vars.push("#t".to_string());
        vars.extend(self.vars.iter().cloned());
        let order = MonomialOrder::new(
            OrderKind::Elim(Box::new(self.order.kind.clone())),
            vars.len(),
        );
        Arc::new(PolyRing { field: self.field, vars, order })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: u64,
    pub mon: Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<PolyRing>,
    terms: Vec<Term>,
}

impl Polynomial {
    /// Builds a polynomial from arbitrary terms: sorts, merges duplicates,
    /// drops zeros.
    pub fn from_terms(ring: Arc<PolyRing>, mut terms: Vec<Term>) -> Polynomial {
        let order = ring.order.clone();
        terms.retain(|t| t.coeff % ring.field.modulus() != 0);
        for t in &mut terms {
            t.coeff = ring.field.reduce_u64(t.coeff);
            debug_assert_eq!(t.mon.arity(), ring.arity());
        }
        terms.sort_by(|a, b| order.cmp(&b.mon, &a.mon));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = merged.last_mut() {
                if last.mon == t.mon {
                    last.coeff = ring.field.add(last.coeff, t.coeff);
                    if last.coeff == 0 {
                        merged.pop();
                    }
                    continue;
                }
            }
            merged.push(t);
        }
        Polynomial { ring, terms: merged }
    }

    pub fn zero(ring: Arc<PolyRing>) -> Polynomial {
        Polynomial { ring, terms: Vec::new() }
    }

    pub fn constant(ring: Arc<PolyRing>, c: u64) -> Polynomial {
        let c = ring.field.reduce_u64(c);
        if c == 0 {
            return Polynomial::zero(ring);
        }
        let arity = ring.arity();
        Polynomial { ring, terms: vec![Term { coeff: c, mon: Monomial::one(arity) }] }
    }

    pub fn one(ring: Arc<PolyRing>) -> Polynomial {
        Polynomial::constant(ring, 1)
    }

    pub fn variable(ring: Arc<PolyRing>, index: usize) -> Polynomial {
        let arity = ring.arity();
        Polynomial { ring, terms: vec![Term { coeff: 1, mon: Monomial::var(arity, index, 1) }] }
    }

    pub fn monomial(ring: Arc<PolyRing>, coeff: u64, mon: Monomial) -> Polynomial {
        Polynomial::from_terms(ring, vec![Term { coeff, mon }])
    }

    #[inline]
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|t| t.mon.is_one())
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.iter().map(|t| t.mon.total_degree()).max().unwrap_or(0)
    }

    fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let ring = self.ring.clone();
        let f = &ring.field;
        let ord = &ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let a = &self.terms[i];
            let b = &other.terms[j];
            match ord.cmp(&a.mon, &b.mon) {
                std::cmp::Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { f.neg(b.coeff) } else { b.coeff };
                    out.push(Term { coeff: c, mon: b.mon.clone() });
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { f.sub(a.coeff, b.coeff) } else { f.add(a.coeff, b.coeff) };
                    if c != 0 {
                        out.push(Term { coeff: c, mon: a.mon.clone() });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        for b in &other.terms[j..] {
            let c = if negate { f.neg(b.coeff) } else { b.coeff };
            out.push(Term { coeff: c, mon: b.mon.clone() });
        }
        Polynomial { ring, terms: out }
    }

    pub fn neg(&self) -> Polynomial {
        let f = &self.ring.field;
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: f.neg(t.coeff), mon: t.mon.clone() })
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Polynomial {
        let f = &self.ring.field;
        let c = f.reduce_u64(c);
        if c == 0 {
            return Polynomial::zero(self.ring.clone());
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term { coeff: f.mul(t.coeff, c), mon: t.mon.clone() })
                .collect(),
        }
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, c: u64, m: &Monomial) -> Result<Polynomial> {
        let f = &self.ring.field;
        let c = f.reduce_u64(c);
        if c == 0 {
            return Ok(Polynomial::zero(self.ring.clone()));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(Term { coeff: f.mul(t.coeff, c), mon: t.mon.mul(m)? });
        }
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(self.ring.clone()));
        }
        // accumulate into a map keyed by exponent vector, then sort once
        let f = self.ring.field;
        let mut acc: std::collections::HashMap<Vec<u32>, u64> =
            std::collections::HashMap::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let m = a.mon.mul(&b.mon)?;
                let c = f.mul(a.coeff, b.coeff);
                let slot = acc.entry(m.exps().to_vec()).or_insert(0);
                *slot = f.add(*slot, c);
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(e, c)| Term { coeff: c, mon: Monomial::new(e) })
            .collect();
        Ok(Polynomial::from_terms(self.ring.clone(), terms))
    }

    /// `f^{p^e}`, computed termwise: Frobenius is a ring map and every
    /// coefficient of F_p is fixed by it, so `(c, m)` maps to `(c, m^{p^e})`.
    /// Never computed by repeated multiplication.
    pub fn frobenius_power(&self, e: u32) -> Result<Polynomial> {
        let q = checked_q(self.ring.field.modulus(), e)?;
        if q == 1 {
            return Ok(self.clone());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(Term { coeff: t.coeff, mon: t.mon.pow_scalar(q)? });
        }
        Ok(Polynomial { ring: self.ring.clone(), terms })
    }

    /// Integer power by repeated squaring (used by the expression parser
    /// and ideal powers, not by bracket powers).
    pub fn pow(&self, n: u32) -> Result<Polynomial> {
        let mut acc = Polynomial::one(self.ring.clone());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Makes the leading coefficient 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            None => self.clone(),
            Some(lt) if lt.coeff == 1 => self.clone(),
            Some(lt) => self.scale(self.ring.field.inv(lt.coeff)),
        }
    }

    /// Exact division by `g`; returns `None` when `g` does not divide `self`.
    pub fn div_exact(&self, g: &Polynomial) -> Option<Polynomial> {
        if g.is_zero() {
            return None;
        }
        let f = &self.ring.field;
        let glt = g.leading_term().unwrap();
        let glc_inv = f.inv(glt.coeff);
        let mut rem = self.clone();
        let mut quot: Vec<Term> = Vec::new();
        while let Some(rlt) = rem.leading_term() {
            let qm = rlt.mon.div(&glt.mon)?;
            let qc = f.mul(rlt.coeff, glc_inv);
            quot.push(Term { coeff: qc, mon: qm.clone() });
            let sub = g.mul_term(qc, &qm).ok()?;
            rem = rem.merge(&sub, true);
        }
        Some(Polynomial::from_terms(self.ring.clone(), quot))
    }

    /// Checks the structural invariant: strictly descending monomials and
    /// nonzero reduced coefficients.
    pub fn is_normalized(&self) -> bool {
        let p = self.ring.field.modulus();
        if !self.terms.iter().all(|t| t.coeff > 0 && t.coeff < p) {
            return false;
        }
        self.terms.windows(2).all(|w| {
            self.ring.order.cmp(&w[0].mon, &w[1].mon) == std::cmp::Ordering::Greater
        })
    }

    /// Re-sorts the term list into another ring with identical field and
    /// variables but a different order.
    pub fn reorder(&self, ring: &Arc<PolyRing>) -> Polynomial {
        debug_assert_eq!(self.ring.vars, ring.vars);
        Polynomial::from_terms(
            ring.clone(),
            self.terms.iter().map(|t| Term { coeff: t.coeff, mon: t.mon.clone() }).collect(),
        )
    }
}

/// `p^e` as a checked u64.
pub fn checked_q(p: u64, e: u32) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..e {
        q = q
            .checked_mul(p)
            .ok_or_else(|| Error::ExponentOverflow(format!("p^{} exceeds 64 bits", e)))?;
    }
    Ok(q)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for t in &self.terms {
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            if t.mon.is_one() {
                write!(out, "{}", t.coeff)?;
                continue;
            }
            let mut factors: Vec<String> = Vec::new();
            if t.coeff != 1 {
                factors.push(t.coeff.to_string());
            }
            for (i, &e) in t.mon.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.vars[i], e)),
                }
            }
            write!(out, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
