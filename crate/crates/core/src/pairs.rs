//! F-signature of ideal pairs (R, 𝔞^t): splitting-number tables through the
//! socle-colon formula with the 𝔞-exponent twist 𝔞^{⌈t(q-1)⌉}.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groebner::Budget;
use crate::invariants::{stabilized_colon, validate_chain, FsigComputation};
use crate::quotient::{QuotientIdeal, RingPresentation};
use crate::table::{estimate, Estimate, InvariantTable, TableKind};

/// A pair (R, 𝔞^t) with exact non-negative rational exponent.
#[derive(Debug, Clone)]
pub struct PairSpec {
    pub base: Arc<RingPresentation>,
    pub a: QuotientIdeal,
    pub t: BigRational,
}

impl PairSpec {
    pub fn new(base: Arc<RingPresentation>, a: QuotientIdeal, t: BigRational) -> Result<Self> {
        if t.is_negative() {
            return Err(Error::Invalid("pair exponent must be non-negative".into()));
        }
        if a.is_zero(&Budget::default())? {
            return Err(Error::Invalid("pair ideal must be nonzero".into()));
        }
        Ok(PairSpec { base, a, t })
    }

    /// ⌈t(q-1)⌉ in exact integer arithmetic.
    pub fn ceil_exponent(&self, q: u64) -> Result<u64> {
        let qm1 = BigInt::from(q - 1);
        let num = self.t.numer() * &qm1;
        let den = self.t.denom().clone();
        // num >= 0 and den > 0, so truncating division of (num + den - 1)
        // is the ceiling
        let ceil = (num + &den - BigInt::from(1)) / den;
        ceil.to_u64().ok_or_else(|| Error::ExponentOverflow("ceil(t(q-1))".into()))
    }
}

/// Cap on the number of generators carried by an ideal power before the
/// step falls back to the basis-reduced generating set.
const POWER_GENERATOR_CAP: usize = 512;

/// The ordinary ideal power 𝔞^n, built incrementally with basis reduction
/// between steps to cap generator blowup. 𝔞^0 = R.
pub fn ideal_ceil_power(a: &QuotientIdeal, n: u64, budget: &Budget) -> Result<QuotientIdeal> {
    let pres = a.presentation().clone();
    let one = crate::poly::Polynomial::one(pres.ambient().clone());
    if n == 0 {
        return Ok(pres.ideal(vec![one]));
    }
    let base: Vec<crate::poly::Polynomial> = a.own_generators().to_vec();
    let mut current = pres.ideal(base.clone());
    for _ in 1..n {
        let mut next_gens = Vec::new();
        for g in current.own_generators() {
            for h in &base {
                next_gens.push(g.mul(h)?);
            }
        }
        let mut next = pres.ideal(next_gens);
        if next.own_generators().len() > POWER_GENERATOR_CAP {
            let reduced = next.groebner(budget)?.elements().to_vec();
            if reduced.len() > POWER_GENERATOR_CAP {
                return Err(Error::budget("ideal power generator cap"));
            }
            next = pres.ideal(reduced);
        }
        current = next;
    }
    Ok(current)
}

/// Splitting numbers of the pair along a descending irreducible chain:
/// per `e` the t-stabilized value of ℓ(R/(J_t^{[q]} : 𝔞^{⌈ξ(q-1)⌉} δ_t^{q})),
/// normalized by q^dim(R).
pub fn pair_fsig_function(
    spec: &PairSpec,
    chain: &[QuotientIdeal],
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<FsigComputation> {
    let pres = &spec.base;
    let links = validate_chain(chain, budget)?;
    let p = pres.prime();
    let work = |e: u32| -> Result<((BigUint, Option<u32>), QuotientIdeal)> {
        let q = crate::poly::checked_q(p, e)?;
        let n = spec.ceil_exponent(q)?;
        let twist = ideal_ceil_power(&spec.a, n, budget)?;
        if twist.is_unit(budget)? {
            stabilized_colon(&links, e, None, budget)
        } else {
            stabilized_colon(&links, e, Some(&twist), budget)
        }
    };
    let rows: Vec<_> = if threads <= 1 {
        (0..=e_max).map(work).collect()
    } else {
        // same parallel shape as the plain invariants
        let slots: std::sync::Mutex<Vec<Option<Result<_>>>> =
            std::sync::Mutex::new((0..=e_max).map(|_| None).collect());
        std::thread::scope(|scope| {
            for worker in 0..threads.min(e_max as usize + 1) {
                let slots = &slots;
                let work = &work;
                scope.spawn(move || {
                    let mut e = worker as u32;
                    while e <= e_max {
                        let out = work(e);
                        slots.lock().expect("row mutex").as_mut_slice()[e as usize] = Some(out);
                        e += threads as u32;
                    }
                });
            }
        });
        slots.into_inner().expect("row mutex").into_iter().map(|s| s.expect("computed")).collect()
    };
    let mut table = InvariantTable::new(TableKind::Pair, pres.prime(), pres.dim());
    let mut ideals = Vec::new();
    for (e, row) in rows.into_iter().enumerate() {
        match row {
            Ok(((len, stab), ideal)) => {
                table.push(e as u32, len, stab);
                ideals.push(ideal);
            }
            Err(Error::BudgetExceeded { context, .. }) => {
                return Err(Error::BudgetExceeded { context, partial: Some(Box::new(table)) });
            }
            Err(other) => return Err(other),
        }
    }
    let socle_generator = links[0].socle_generator.clone();
    Ok(FsigComputation { table, ideals, socle_generator })
}

/// Identical contract to the plain estimator.
pub fn pair_fsig_estimate(table: &InvariantTable) -> Result<Estimate> {
    estimate(table)
}
