//! Exponent vectors and monomial orders.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A monomial, stored as its exponent vector with a cached total degree.
///
/// Exponents are 32-bit; bracket powers multiply exponents by `p^e`, and
/// overflow is reported rather than wrapped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u64,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().map(|&e| e as u64).sum();
        Monomial { exps, degree }
    }

    pub fn one(arity: usize) -> Self {
        Monomial { exps: vec![0; arity], degree: 0 }
    }

    pub fn var(arity: usize, index: usize, exp: u32) -> Self {
        let mut exps = vec![0; arity];
        exps[index] = exp;
        Monomial { exps, degree: exp as u64 }
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    #[inline]
    pub fn total_degree(&self) -> u64 {
        self.degree
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        debug_assert_eq!(self.arity(), other.arity());
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_add(*b).ok_or_else(|| {
                Error::ExponentOverflow(format!("{} + {} exceeds 32 bits", a, b))
            })?);
        }
        Ok(Monomial::new(exps))
    }

    /// Raises the monomial to an integer power, e.g. the `p^e` of a bracket power.
    pub fn pow_scalar(&self, k: u64) -> Result<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for &a in &self.exps {
            let v = (a as u64).checked_mul(k).filter(|&v| v <= u32::MAX as u64);
            exps.push(v.ok_or_else(|| {
                Error::ExponentOverflow(format!("{} * {} exceeds 32 bits", a, k))
            })? as u32);
        }
        Ok(Monomial::new(exps))
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree
            && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Exact quotient `self / other`; `None` when `other` does not divide.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial::new(
            self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(
            self.exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn gcd_is_one(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Variable indices with nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    GrLex,
    GrevLex,
    /// Block order eliminating the first variable: compares its exponent
    /// first, then the inner order on the remaining variables. Used for
    /// tag-variable intersections; not exposed through the CLI.
    Elim(Box<OrderKind>),
}

impl OrderKind {
    pub fn name(&self) -> &'static str {
        match self {
            OrderKind::Lex => "lex",
            OrderKind::GrLex => "grlex",
            OrderKind::GrevLex => "grevlex",
            OrderKind::Elim(_) => "elim",
        }
    }
}

/// A monomial order: an order kind plus a variable permutation.
///
/// `perm[i]` is the variable compared at position `i`; identity by default.
/// Every kind is a total order refining divisibility with 1 minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, arity: usize) -> Self {
        MonomialOrder { kind, perm: (0..arity).collect() }
    }

    pub fn grevlex(arity: usize) -> Self {
        Self::new(OrderKind::GrevLex, arity)
    }

    pub fn lex(arity: usize) -> Self {
        Self::new(OrderKind::Lex, arity)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.cmp_perm(&self.perm, &self.kind, a.exps(), b.exps(), a.total_degree(), b.total_degree())
    }

    fn cmp_perm(
        &self,
        perm: &[usize],
        kind: &OrderKind,
        a: &[u32],
        b: &[u32],
        dega: u64,
        degb: u64,
    ) -> Ordering {
        match kind {
            OrderKind::Lex => {
                for &i in perm {
                    match a[i].cmp(&b[i]) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            OrderKind::GrLex => match dega.cmp(&degb) {
                Ordering::Equal => self.cmp_perm(perm, &OrderKind::Lex, a, b, dega, degb),
                ord => ord,
            },
            OrderKind::GrevLex => {
                match dega.cmp(&degb) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                for &i in perm.iter().rev() {
                    match a[i].cmp(&b[i]) {
                        Ordering::Equal => continue,
                        // smaller exponent in the last differing position wins
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Elim(inner) => {
                let t = perm[0];
                match a[t].cmp(&b[t]) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                let rest = &perm[1..];
                let da = dega - a[t] as u64;
                let db = degb - b[t] as u64;
                self.cmp_perm(rest, inner, a, b, da, db)
            }
        }
    }
}
