//! Per-`e` invariant tables and the two-term limit estimator.
//!
//! A table row holds the exact colength at one Frobenius iterate together
//! with its normalization by `q^d`. The estimator fits
//! `length = eta * q^d + alpha * q^(d-1)` through the last two rows and
//! reports an empirical error envelope alongside the model residual.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Hk,
    Fsig,
    RelHk,
    Pair,
    Seq,
}

impl TableKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TableKind::Hk => "HK",
            TableKind::Fsig => "FSIG",
            TableKind::RelHk => "RELHK",
            TableKind::Pair => "PAIR",
            TableKind::Seq => "SEQ",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub e: u32,
    /// p^e, exactly.
    pub q: BigUint,
    /// Exact colength at this iterate.
    pub length: BigUint,
    /// length / q^d as an exact rational.
    pub normalized: BigRational,
    /// Chain index at which the value stabilized, for chain computations.
    pub stabilized_t: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantTable {
    pub kind: TableKind,
    /// Normalizing dimension: rows carry length / q^d.
    pub d: usize,
    pub p: u64,
    pub rows: Vec<TableRow>,
}

impl InvariantTable {
    pub fn new(kind: TableKind, p: u64, d: usize) -> Self {
        InvariantTable { kind, d, p, rows: Vec::new() }
    }

    /// Appends a row; rows must arrive with strictly increasing `e`.
    pub fn push(&mut self, e: u32, length: BigUint, stabilized_t: Option<u32>) {
        debug_assert!(self.rows.last().map_or(true, |r| r.e < e));
        let q = BigUint::from(self.p).pow(e);
        let qd = BigInt::from(q.clone().pow(self.d as u32));
        let normalized = BigRational::new(BigInt::from(length.clone()), qd);
        self.rows.push(TableRow { e, q, length, normalized, stabilized_t });
    }

    pub fn normalized_floats(&self) -> Vec<f64> {
        self.rows.iter().map(|r| rational_to_f64(&r.normalized)).collect()
    }

    /// Empirical convergence envelope `|n_{e+1} - n_e| * p^e` over
    /// consecutive rows, as exact rationals paired with the lower `e`.
    pub fn envelope(&self) -> Vec<(u32, BigRational)> {
        self.rows
            .windows(2)
            .map(|w| {
                let diff = (&w[1].normalized - &w[0].normalized).abs();
                let scale = BigRational::from(BigInt::from(self.p).pow(w[0].e));
                (w[0].e, diff * scale)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Estimate {
    /// Fitted limit, exact.
    pub eta: BigRational,
    pub eta_f64: f64,
    /// Second model coefficient; reported, not a certified invariant.
    pub alpha_f64: f64,
    /// max(model residual at the third-last row, empirical 2C/p^e envelope).
    pub error_bound: f64,
    pub model: String,
    /// e-range of the rows the fit used.
    pub samples_used: (u32, u32),
}

/// Fits the two-term growth model through the last two rows of a table.
///
/// For `d = 0` the model degenerates to a constant and the last row is the
/// estimate. Requires at least three rows so a residual can be reported.
pub fn estimate(table: &InvariantTable) -> Result<Estimate> {
    let k = table.rows.len();
    if k < 3 {
        return Err(Error::InsufficientSamples(k));
    }
    let r1 = &table.rows[k - 1];
    let r2 = &table.rows[k - 2];
    let r3 = &table.rows[k - 3];
    let d = table.d;

    let (eta, alpha) = if d == 0 {
        (r1.normalized.clone(), BigRational::zero())
    } else {
        // Cramer on  l = eta q^d + alpha q^(d-1)  at the last two rows
        let q1 = BigRational::from(BigInt::from(r1.q.clone()));
        let q2 = BigRational::from(BigInt::from(r2.q.clone()));
        let l1 = BigRational::from(BigInt::from(r1.length.clone()));
        let l2 = BigRational::from(BigInt::from(r2.length.clone()));
        let q1d = pow_rat(&q1, d);
        let q2d = pow_rat(&q2, d);
        let q1d1 = pow_rat(&q1, d - 1);
        let q2d1 = pow_rat(&q2, d - 1);
        let det = &q1d * &q2d1 - &q2d * &q1d1;
        debug_assert!(!det.is_zero());
        let eta = (&l1 * &q2d1 - &l2 * &q1d1) / det.clone();
        let alpha = (&q1d * &l2 - &q2d * &l1) / det;
        (eta, alpha)
    };

    // residual of the model at the third-last row, normalized by q^d
    let q3 = BigRational::from(BigInt::from(r3.q.clone()));
    let l3 = BigRational::from(BigInt::from(r3.length.clone()));
    let q3d = pow_rat(&q3, d);
    let predicted =
        &eta * &q3d + if d == 0 { BigRational::zero() } else { &alpha * pow_rat(&q3, d - 1) };
    let residual = ((l3 - predicted) / q3d).abs();

    // empirical envelope constant
    let c_hat = table
        .envelope()
        .into_iter()
        .map(|(_, v)| v)
        .max()
        .unwrap_or_else(BigRational::zero);
    let p_e_last = BigRational::from(BigInt::from(table.p).pow(r1.e));
    let envelope_bound = BigRational::from(BigInt::from(2)) * c_hat / p_e_last;

    let error_bound = rational_to_f64(&residual).max(rational_to_f64(&envelope_bound));
    Ok(Estimate {
        eta_f64: rational_to_f64(&eta),
        alpha_f64: rational_to_f64(&alpha),
        eta,
        error_bound,
        model: format!(
            "length ~ eta*q^{} + alpha*q^{}; fit on last two rows",
            d,
            d.saturating_sub(1)
        ),
        samples_used: (r2.e, r1.e),
    })
}

fn pow_rat(x: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::from(BigInt::from(1));
    for _ in 0..n {
        acc *= x;
    }
    acc
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    let num = x.numer().to_f64().unwrap_or(f64::NAN);
    let den = x.denom().to_f64().unwrap_or(f64::NAN);
    if num.is_finite() && den.is_finite() && den != 0.0 {
        num / den
    } else {
        // fall back to a rounded division for very large entries
        let scaled = (x * BigRational::from(BigInt::from(1u64 << 53))).to_integer();
        scaled.to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_from_lengths(p: u64, d: usize, lengths: &[u64]) -> InvariantTable {
        let mut t = InvariantTable::new(TableKind::Hk, p, d);
        for (e, &l) in lengths.iter().enumerate() {
            t.push(e as u32, BigUint::from(l), None);
        }
        t
    }

    #[test]
    fn regular_table_estimates_one_exactly() {
        // lengths q^2 for p = 3
        let t = table_from_lengths(3, 2, &[1, 9, 81, 729]);
        let est = estimate(&t).unwrap();
        assert_eq!(est.eta, BigRational::from(BigInt::from(1)));
        assert_eq!(est.alpha_f64, 0.0);
        assert_eq!(est.error_bound, 0.0);
    }

    #[test]
    fn constant_normalized_table_returns_the_constant() {
        // lengths 2 q for p = 2, d = 1
        let t = table_from_lengths(2, 1, &[2, 4, 8, 16]);
        let est = estimate(&t).unwrap();
        assert_eq!(est.eta, BigRational::from(BigInt::from(2)));
        assert_eq!(est.error_bound, 0.0);
    }

    #[test]
    fn affine_growth_is_fit_exactly() {
        // lengths 2q + 3 (d = 1, p = 5): eta = 2, alpha = 3, residual 0
        let t = table_from_lengths(5, 1, &[5, 13, 53, 253]);
        let est = estimate(&t).unwrap();
        assert_eq!(est.eta, BigRational::from(BigInt::from(2)));
        assert_eq!(est.alpha_f64, 3.0);
    }

    #[test]
    fn dimension_zero_uses_last_row() {
        let t = table_from_lengths(2, 0, &[1, 0, 0]);
        let est = estimate(&t).unwrap();
        assert!(est.eta.is_zero());
    }

    #[test]
    fn needs_three_rows() {
        let t = table_from_lengths(3, 1, &[1, 3]);
        assert!(matches!(estimate(&t), Err(Error::InsufficientSamples(2))));
    }

    #[test]
    fn eta_lies_within_sample_envelope() {
        // quadric cone lengths (3q^2 - 1)/2: samples increase toward 1.5
        let t = table_from_lengths(3, 2, &[1, 13, 121, 1093]);
        let est = estimate(&t).unwrap();
        let floats = t.normalized_floats();
        let max = floats.iter().cloned().fold(f64::MIN, f64::max);
        let min = floats.iter().cloned().fold(f64::MAX, f64::min);
        assert!(est.error_bound >= 0.0);
        assert!(est.eta_f64 <= max + est.error_bound && est.eta_f64 >= min - est.error_bound);
        assert!((est.eta_f64 - 1.5).abs() < 0.05);
    }
}
