//! Hilbert-Kunz functions and multiplicities, F-splitting numbers and
//! F-signature through socle colons, relative Hilbert-Kunz differences,
//! tight-closure membership evidence, the F-splitting prime probe, and a
//! generic ideal-sequence limit engine.
//!
//! Every per-`e` value is an exact colength; limits are estimated from the
//! table by the two-term model in [`crate::table::estimate`]. The double
//! limit (chain index t, Frobenius iterate e) is resolved per `e` by
//! t-stabilization: two consecutive chain links giving the same colength.
//! The stabilization index is recorded in the row, never silently trusted.

use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::groebner::Budget;
use crate::poly::Polynomial;
use crate::quotient::{QuotientIdeal, RingPresentation};
use crate::table::{estimate, Estimate, InvariantTable, TableKind};

/// A candidate homogeneous system of parameters: `dim(R)` elements whose
/// sum with Q is zero-dimensional (verified at construction).
#[derive(Debug, Clone)]
pub struct Sop {
    pub elements: Vec<Polynomial>,
    pub seed: Option<u64>,
}

impl Sop {
    /// Wraps user-supplied elements after checking zero-dimensionality.
    pub fn from_elements(
        pres: &Arc<RingPresentation>,
        elements: Vec<Polynomial>,
        budget: &Budget,
    ) -> Result<Sop> {
        if elements.len() != pres.dim() {
            return Err(Error::Invalid(format!(
                "system of parameters needs {} elements, got {}",
                pres.dim(),
                elements.len()
            )));
        }
        let ideal = pres.ideal(elements.clone());
        if !ideal.is_zero_dimensional(budget)? {
            return Err(Error::Invalid(
                "candidate parameters do not cut the ring down to dimension zero".into(),
            ));
        }
        Ok(Sop { elements, seed: None })
    }

    pub fn ideal(&self, pres: &Arc<RingPresentation>) -> QuotientIdeal {
        pres.ideal(self.elements.clone())
    }
}

const SOP_ATTEMPTS: usize = 40;

/// Searches for a system of parameters: random linear combinations of the
/// variables first, then denser degree-2 combinations. Deterministic in the
/// seed. Assumes an equidimensional input (user-declared).
pub fn find_sop(pres: &Arc<RingPresentation>, seed: u64, budget: &Budget) -> Result<Sop> {
    let d = pres.dim();
    if d == 0 {
        return Ok(Sop { elements: Vec::new(), seed: Some(seed) });
    }
    let ring = pres.ambient().clone();
    let p = ring.field.modulus();
    let n = ring.arity();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..SOP_ATTEMPTS {
        let quadratic = attempt >= SOP_ATTEMPTS / 2;
        let mut elements = Vec::with_capacity(d);
        for _ in 0..d {
            loop {
                let mut f = Polynomial::zero(ring.clone());
                for i in 0..n {
                    let c = rng.next_u64() % p;
                    let var = Polynomial::variable(ring.clone(), i);
                    f = f.add(&var.scale(c))?;
                    if quadratic {
                        for j in i..n {
                            let c2 = rng.next_u64() % p;
                            let vj = Polynomial::variable(ring.clone(), j);
                            f = f.add(&var.mul(&vj)?.scale(c2))?;
                        }
                    }
                }
                if !f.is_zero() {
                    elements.push(f);
                    break;
                }
            }
        }
        let ideal = pres.ideal(elements.clone());
        if ideal.is_zero_dimensional(budget).unwrap_or(false) {
            return Ok(Sop { elements, seed: Some(seed) });
        }
    }
    Err(Error::SOPNotFound(SOP_ATTEMPTS))
}

/// Runs `work(e)` for e = 0..=e_max, optionally across threads. Results are
/// assembled in e-order, so output is identical regardless of thread count.
fn compute_rows<T, F>(e_max: u32, threads: usize, work: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(u32) -> Result<T> + Sync,
{
    let count = e_max as usize + 1;
    if threads <= 1 || count <= 1 {
        return (0..=e_max).map(&work).collect();
    }
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for worker in 0..threads.min(count) {
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
    slots
        .into_inner()
        .expect("row mutex")
        .into_iter()
        .map(|slot| slot.expect("every row computed"))
        .collect()
}

/// Assembles rows into a table, attaching the completed prefix to a budget
/// error so partial progress is reported.
fn assemble(
    kind: TableKind,
    pres: &RingPresentation,
    d: usize,
    rows: Vec<Result<(BigUint, Option<u32>)>>,
) -> Result<InvariantTable> {
    let mut table = InvariantTable::new(kind, pres.prime(), d);
    for (e, row) in rows.into_iter().enumerate() {
        match row {
            Ok((len, stab)) => table.push(e as u32, len, stab),
            Err(Error::BudgetExceeded { context, .. }) => {
                return Err(Error::BudgetExceeded { context, partial: Some(Box::new(table)) });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(table)
}

fn split_rows(
    rows: Vec<Result<((BigUint, Option<u32>), QuotientIdeal)>>,
) -> (Vec<Result<(BigUint, Option<u32>)>>, Vec<QuotientIdeal>) {
    let mut ideals = Vec::with_capacity(rows.len());
    let mut plain = Vec::with_capacity(rows.len());
    for row in rows {
        match row {
            Ok((lv, ideal)) => {
                ideals.push(ideal);
                plain.push(Ok(lv));
            }
            Err(err) => plain.push(Err(err)),
        }
    }
    (plain, ideals)
}

/// The Hilbert-Kunz function of an m-primary ideal: exact lengths
/// ℓ_R(R/I^{[p^e]}) for e = 0..e_max, normalized by q^dim(R).
pub fn hk_function(
    pres: &Arc<RingPresentation>,
    ideal: &QuotientIdeal,
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<InvariantTable> {
    if ideal.is_unit(budget)? {
        return Err(Error::UnitIdeal);
    }
    let rows = compute_rows(e_max, threads, |e| {
        let bracket = ideal.bracket_power(e)?;
        Ok((bracket.colength(budget)?, None))
    });
    assemble(TableKind::Hk, pres, pres.dim(), rows)
}

/// Fits the two-term limit model to a table; see [`crate::table::estimate`].
pub fn hk_estimate(table: &InvariantTable) -> Result<Estimate> {
    estimate(table)
}

/// F-splitting numbers and the splitting ideals they are lengths of.
#[derive(Debug, Clone)]
pub struct FsigComputation {
    pub table: InvariantTable,
    /// The ideal whose colength is row e, aligned with `table.rows`.
    pub ideals: Vec<QuotientIdeal>,
    pub socle_generator: Polynomial,
}

/// F-splitting numbers of a Gorenstein ring through the parameter-ideal
/// socle colon: a_e = ℓ_R(R/(J^{[p^e]} : δ^{p^e})) where J = (sop) and δ
/// generates the socle of R/J. Requires J irreducible.
pub fn fsig_function_gorenstein(
    pres: &Arc<RingPresentation>,
    sop: &Sop,
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<FsigComputation> {
    let j = sop.ideal(pres);
    let delta = match j.socle_generator(budget) {
        Ok(d) => d,
        Err(Error::NotIrreducible(dim)) => return Err(Error::NotGorenstein(dim)),
        Err(other) => return Err(other),
    };
    let rows = compute_rows(e_max, threads, |e| {
        let colon = j.bracket_power(e)?.colon_poly(&delta.frobenius_power(e)?, budget)?;
        let len = colon.colength(budget)?;
        Ok(((len, None), colon))
    });
    let (plain, ideals) = split_rows(rows);
    let table = assemble(TableKind::Fsig, pres, pres.dim(), plain)?;
    Ok(FsigComputation { table, ideals, socle_generator: delta })
}

/// One validated link of a descending irreducible chain.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub ideal: QuotientIdeal,
    pub socle_generator: Polynomial,
}

/// Validates a user-supplied descending chain of irreducible m-primary
/// ideals: inclusions J_1 ⊇ J_2 ⊇ ... and a one-dimensional socle per link.
pub fn validate_chain(chain: &[QuotientIdeal], budget: &Budget) -> Result<Vec<ChainLink>> {
    if chain.is_empty() {
        return Err(Error::Invalid("empty chain".into()));
    }
    let mut links = Vec::with_capacity(chain.len());
    for (t, ideal) in chain.iter().enumerate() {
        if t > 0 {
            for g in ideal.own_generators() {
                if !chain[t - 1].contains(g, budget)? {
                    return Err(Error::Invalid(format!(
                        "chain is not descending at index {}",
                        t + 1
                    )));
                }
            }
        }
        let socle_generator = ideal.socle_generator(budget)?;
        links.push(ChainLink { ideal: ideal.clone(), socle_generator });
    }
    Ok(links)
}

/// F-splitting numbers along a descending irreducible chain: for each `e`
/// the colengths ℓ(R/(J_t^{[q]} : δ_t^{q})) ascend the chain until two
/// consecutive links agree; the stabilized value is a_e.
pub fn fsig_function_chain(
    pres: &Arc<RingPresentation>,
    chain: &[QuotientIdeal],
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<FsigComputation> {
    let links = validate_chain(chain, budget)?;
    let rows = compute_rows(e_max, threads, |e| stabilized_colon(&links, e, None, budget));
    let (plain, ideals) = split_rows(rows);
    let table = assemble(TableKind::Fsig, pres, pres.dim(), plain)?;
    Ok(FsigComputation { table, ideals, socle_generator: links[0].socle_generator.clone() })
}

/// Walks the chain at fixed `e` until two consecutive colengths agree.
/// `twist` multiplies the colon denominator by an extra ideal (used by pair
/// signatures); colons are then taken against twist * δ_t^{q}.
pub(crate) fn stabilized_colon(
    links: &[ChainLink],
    e: u32,
    twist: Option<&QuotientIdeal>,
    budget: &Budget,
) -> Result<((BigUint, Option<u32>), QuotientIdeal)> {
    let mut prev: Option<(BigUint, QuotientIdeal)> = None;
    for (idx, link) in links.iter().enumerate() {
        let delta_q = link.socle_generator.frobenius_power(e)?;
        let bracket = link.ideal.bracket_power(e)?;
        let colon = match twist {
            None => bracket.colon_poly(&delta_q, budget)?,
            Some(a) => bracket.colon_poly(&delta_q, budget)?.colon_ideal(a, budget)?,
        };
        let len = colon.colength(budget)?;
        if let Some((prev_len, _)) = &prev {
            if *prev_len == len {
                return Ok(((len, Some(idx as u32 + 1)), colon));
            }
        }
        prev = Some((len, colon));
    }
    let best = prev.map(|(l, _)| l.to_string()).unwrap_or_else(|| "none".into());
    Err(Error::ChainExhausted { e, best })
}

/// The relative Hilbert-Kunz table of (I, x): per `e` the common value of
/// ℓ(R/I^{[q]}) − ℓ(R/(I,x)^{[q]}) and ℓ(R/(I^{[q]} : x^{q})), asserted
/// equal. A mismatch is an engine bug, surfaced as IdentityViolation.
pub fn relative_hk(
    pres: &Arc<RingPresentation>,
    ideal: &QuotientIdeal,
    x: &Polynomial,
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<InvariantTable> {
    let rows = compute_rows(e_max, threads, |e| {
        let bracket = ideal.bracket_power(e)?;
        let xq = x.frobenius_power(e)?;
        let len_i = bracket.colength(budget)?;
        let len_ix = bracket.plus_element(&xq).colength(budget)?;
        let len_colon = bracket.colon_poly(&xq, budget)?.colength(budget)?;
        let diff = len_i.clone() - len_ix.clone();
        if diff != len_colon {
            return Err(Error::IdentityViolation {
                e,
                details: format!(
                    "l(R/I^q) = {len_i}, l(R/(I,x)^q) = {len_ix}, l(R/(I^q:x^q)) = {len_colon}"
                ),
            });
        }
        Ok((len_colon, None))
    });
    assemble(TableKind::RelHk, pres, pres.dim(), rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    InIdeal,
    InClosureLikely,
    NotInClosure,
    Inconclusive,
}

impl TcStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TcStatus::InIdeal => "InIdeal",
            TcStatus::InClosureLikely => "InClosureLikely",
            TcStatus::NotInClosure => "NotInClosure",
            TcStatus::Inconclusive => "Inconclusive",
        }
    }
}

/// Evidence-grade verdict on tight-closure membership. The criterion is a
/// limit statement, not decidable at finite e; NotInClosure is numerical
/// (threshold tau) and InClosureLikely requires a stabilized nonzero common
/// multiplier ideal.
#[derive(Debug, Clone)]
pub struct TcVerdict {
    pub status: TcStatus,
    pub table: Option<InvariantTable>,
    pub estimate: Option<Estimate>,
    /// Generators of the stabilized ∩_e (I^{[q]} : x^{q}), when nonzero.
    pub multiplier_ideal: Option<Vec<String>>,
    pub notes: Vec<String>,
}

pub fn tc_membership(
    pres: &Arc<RingPresentation>,
    ideal: &QuotientIdeal,
    x: &Polynomial,
    e_max: u32,
    tau: f64,
    budget: &Budget,
    threads: usize,
) -> Result<TcVerdict> {
    if ideal.contains(x, budget)? {
        return Ok(TcVerdict {
            status: TcStatus::InIdeal,
            table: None,
            estimate: None,
            multiplier_ideal: None,
            notes: vec!["normal form of the element modulo I is zero".into()],
        });
    }
    let mut notes = Vec::new();
    let table = match relative_hk(pres, ideal, x, e_max, budget, threads) {
        Ok(t) => t,
        Err(Error::BudgetExceeded { context, partial }) => {
            notes.push(format!("budget exhausted while tabulating: {context}"));
            match partial {
                Some(t) if t.rows.len() >= 3 => *t,
                _ => {
                    return Ok(TcVerdict {
                        status: TcStatus::Inconclusive,
                        table: None,
                        estimate: None,
                        multiplier_ideal: None,
                        notes,
                    })
                }
            }
        }
        Err(other) => return Err(other),
    };
    let est = estimate(&table)?;
    let normals = table.normalized_floats();
    let positive = normals.iter().all(|&v| v > 0.0);
    let trending_down = normals.last() <= normals.first();
    if est.eta_f64 >= tau && positive && trending_down {
        return Ok(TcVerdict {
            status: TcStatus::NotInClosure,
            table: Some(table),
            estimate: Some(est),
            multiplier_ideal: None,
            notes,
        });
    }
    // look for a stabilized nonzero common multiplier: ∩_{e<=E} (I^[q] : x^q)
    let mut meet: Option<QuotientIdeal> = None;
    let mut previous: Option<QuotientIdeal> = None;
    for e in 0..=e_max {
        let colon = ideal.bracket_power(e)?.colon_poly(&x.frobenius_power(e)?, budget)?;
        meet = Some(match meet {
            None => colon,
            Some(acc) => {
                previous = Some(acc.clone());
                acc.intersect(&colon, budget)?
            }
        });
    }
    let meet = meet.expect("e_max >= 0 yields at least one colon");
    let stabilized = match &previous {
        Some(prev) => prev.equals(&meet, budget)?,
        None => false,
    };
    if stabilized && !meet.is_zero(budget)? {
        let gens: Vec<String> =
            meet.groebner(budget)?.elements().iter().map(|g| g.to_string()).collect();
        return Ok(TcVerdict {
            status: TcStatus::InClosureLikely,
            table: Some(table),
            estimate: Some(est),
            multiplier_ideal: Some(gens),
            notes,
        });
    }
    notes.push("no stabilized nonzero multiplier at this depth".into());
    Ok(TcVerdict {
        status: TcStatus::Inconclusive,
        table: Some(table),
        estimate: Some(est),
        multiplier_ideal: None,
        notes,
    })
}

/// Result of probing the F-splitting prime: the stabilized intersection of
/// the splitting ideals, its dimension, and the splitting-ratio fit against
/// q^{n_est}. Primality of the reported ideal is not verified.
///
/// When the running intersection is still shrinking at the last `e`
/// (`stabilized == false`), the evidence points at the zero ideal — the
/// strongly F-regular case — and the probe reports that, with `n_est =
/// dim(R)` so the ratio fit degenerates to the F-signature estimate.
#[derive(Debug, Clone)]
pub struct SplittingProbe {
    pub prime: QuotientIdeal,
    pub stabilized: bool,
    pub n_est: usize,
    pub ratio: Estimate,
}

/// `fsig_ideals` are the splitting ideals aligned with e = 0..E, as
/// returned by the fsig functions. Requires an F-pure input (a_1 >= 1).
pub fn splitting_prime_probe(
    pres: &Arc<RingPresentation>,
    fsig_ideals: &[QuotientIdeal],
    budget: &Budget,
) -> Result<SplittingProbe> {
    if fsig_ideals.len() < 2 {
        return Err(Error::Invalid("need splitting ideals for at least e = 0, 1".into()));
    }
    if fsig_ideals[1].is_unit(budget)? {
        return Err(Error::NotFPure);
    }
    let mut meet = fsig_ideals[0].clone();
    let mut previous = meet.clone();
    for ideal in &fsig_ideals[1..] {
        previous = meet.clone();
        meet = meet.intersect(ideal, budget)?;
    }
    let stabilized = previous.equals(&meet, budget)?;
    let (prime, n_est) = if stabilized {
        let n = meet.krull_dimension(budget)?;
        (meet, n)
    } else {
        (pres.zero_ideal(), pres.dim())
    };
    let mut table = InvariantTable::new(TableKind::Fsig, pres.prime(), n_est);
    for (e, ideal) in fsig_ideals.iter().enumerate() {
        table.push(e as u32, ideal.colength(budget)?, None);
    }
    let ratio = estimate(&table)?;
    Ok(SplittingProbe { prime, stabilized, n_est, ratio })
}

/// Output of the generic sequence-limit engine: the normalized table with
/// its estimate, plus positivity evidence from the running intersection.
#[derive(Debug, Clone)]
pub struct SequenceReport {
    pub table: InvariantTable,
    pub estimate: Estimate,
    pub intersection: QuotientIdeal,
    /// Last two prefix intersections agree.
    pub intersection_stabilized: bool,
    /// The intersection is the zero ideal of R.
    pub intersection_is_zero: bool,
}

/// Limit of ℓ(R/I_e)/q^d for an externally supplied ideal sequence.
/// Element `i` of `seq` is I_e for e = i. Every I_e must contain m^{[p^e]},
/// which is checked and enforced.
pub fn sequence_limit(
    pres: &Arc<RingPresentation>,
    seq: &[QuotientIdeal],
    d_override: Option<usize>,
    budget: &Budget,
    threads: usize,
) -> Result<SequenceReport> {
    if seq.len() < 3 {
        return Err(Error::InsufficientSamples(seq.len()));
    }
    let d = d_override.unwrap_or(pres.dim());
    let m = pres.maximal_ideal();
    for (e, ideal) in seq.iter().enumerate() {
        let mq = m.bracket_power(e as u32)?;
        for g in mq.own_generators() {
            if !ideal.contains(g, budget)? {
                return Err(Error::HypothesisViolation { e: e as u32 });
            }
        }
    }
    let e_max = seq.len() as u32 - 1;
    let rows =
        compute_rows(e_max, threads, |e| Ok((seq[e as usize].colength(budget)?, None::<u32>)));
    let mut table = InvariantTable::new(TableKind::Seq, pres.prime(), d);
    for (e, row) in rows.into_iter().enumerate() {
        table.push(e as u32, row?.0, None);
    }
    let est = estimate(&table)?;
    let mut meet = seq[0].clone();
    let mut previous = meet.clone();
    for ideal in &seq[1..] {
        previous = meet.clone();
        meet = meet.intersect(ideal, budget)?;
    }
    let intersection_stabilized = previous.equals(&meet, budget)?;
    let intersection_is_zero = meet.is_zero(budget)?;
    Ok(SequenceReport {
        table,
        estimate: est,
        intersection: meet,
        intersection_stabilized,
        intersection_is_zero,
    })
}

/// Independent cross-validation oracle for hypersurfaces R = S/(f):
/// tabulates ℓ_S(S/((m_S^{[q]} :_S f^{q-1}) + (f))) per e. Must agree
/// row-by-row with the socle-colon path on Gorenstein test cases; the
/// acceptance suite enforces that agreement before anything trusts it.
pub fn fedder_hypersurface_oracle(
    pres: &Arc<RingPresentation>,
    e_max: u32,
    budget: &Budget,
    threads: usize,
) -> Result<FsigComputation> {
    let q_gb = pres.defining_ideal().groebner(budget)?;
    if q_gb.elements().len() != 1 {
        return Err(Error::NotHypersurface);
    }
    let f = q_gb.elements()[0].clone();
    let ambient = RingPresentation::regular(pres.ambient().clone(), budget)?;
    let m_s = ambient.maximal_ideal();
    let p = pres.prime();
    let rows = compute_rows(e_max, threads, |e| {
        let q = crate::poly::checked_q(p, e)?;
        let exp = u32::try_from(q - 1)
            .map_err(|_| Error::ExponentOverflow("q - 1 exceeds 32 bits".into()))?;
        let f_pow = f.pow(exp)?;
        let colon = m_s.bracket_power(e)?.colon_poly(&f_pow, budget)?;
        // carry the colon over to R = S/(f); the lift merges (f) back in
        let ideal = pres.ideal(colon.own_generators().to_vec());
        let len = ideal.colength(budget)?;
        Ok(((len, None), ideal))
    });
    let (plain, ideals) = split_rows(rows);
    let table = assemble(TableKind::Fsig, pres, pres.dim(), plain)?;
    Ok(FsigComputation { table, ideals, socle_generator: f })
}

/// a_e <= ℓ(R/m^{[q]}) row-by-row; used as a cheap sanity check by callers.
pub fn splitting_numbers_dominated_by_hk(fsig: &InvariantTable, hk: &InvariantTable) -> bool {
    fsig.rows.iter().zip(&hk.rows).all(|(a, b)| a.e == b.e && a.length <= b.length)
}
