//! Buchberger's algorithm with the product and chain criteria, normal
//! forms, colength by staircase counting, and combinatorial Krull
//! dimension. This is the reduction engine every invariant computation
//! sits on.
//!
//! Reduced bases are canonical for a fixed order, so every downstream
//! quantity is deterministic in the input generators.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigUint;
use once_cell::sync::OnceCell;

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::poly::{PolyRing, Polynomial, Term};

/// Per-call computation budget. A budget guards each Groebner basis
/// computation so pathological inputs fail with `BudgetExceeded` instead of
/// hanging.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_reductions: u64,
    pub max_spairs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_reductions: 1_000_000, max_spairs: 200_000 }
    }
}

impl Budget {
    pub fn with_reductions(max_reductions: u64) -> Self {
        Budget { max_reductions, ..Budget::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GbStats {
    pub spairs: u64,
    pub reductions: u64,
}

/// A reduced Groebner basis: monic, auto-reduced, sorted by decreasing
/// leading term.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    elements: Vec<Polynomial>,
    pub stats: GbStats,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.elements == other.elements
    }
}

impl GroebnerBasis {
    #[inline]
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    #[inline]
    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn leading_monomials(&self) -> Vec<&Monomial> {
        self.elements.iter().map(|g| &g.leading_term().expect("basis elements nonzero").mon).collect()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_constant()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.elements.is_empty()
    }

    /// Fully reduces `f` modulo the basis. The result has no term divisible
    /// by any leading term, and is zero exactly when `f` lies in the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let mut steps = u64::MAX;
        reduce(f, &self.elements, true, &mut steps).expect("unbudgeted reduction cannot fail")
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Exponent bound per variable read off the pure powers among leading
    /// terms; `Err` when some variable has none (positive-dimensional).
    fn staircase_bounds(&self) -> Result<Vec<u32>> {
        let n = self.ring.arity();
        let mut bounds = vec![u32::MAX; n];
        for lt in self.leading_monomials() {
            let support = lt.support();
            if support.len() == 1 {
                let i = support[0];
                bounds[i] = bounds[i].min(lt.exps()[i]);
            } else if support.is_empty() {
                // unit ideal
                return Ok(vec![0; n]);
            }
        }
        for (i, b) in bounds.iter().enumerate() {
            if *b == u32::MAX {
                return Err(Error::NotZeroDimensional(self.ring.vars[i].clone()));
            }
        }
        Ok(bounds)
    }

    pub fn is_zero_dimensional(&self) -> bool {
        self.staircase_bounds().is_ok()
    }

    /// Number of standard monomials (monomials outside the leading-term
    /// ideal); this is the F_p-dimension of the quotient, i.e. its length.
    pub fn colength(&self) -> Result<BigUint> {
        if self.is_unit_ideal() {
            return Ok(BigUint::from(0u32));
        }
        if self.is_zero_ideal() {
            let var = self.ring.vars[0].clone();
            return Err(Error::NotZeroDimensional(var));
        }
        let bounds = self.staircase_bounds()?;
        let mut box_size: u64 = 1;
        for &b in &bounds {
            box_size = box_size
                .checked_mul(b as u64)
                .filter(|&v| v <= 100_000_000)
                .ok_or_else(|| Error::budget("staircase box exceeds 10^8 points"))?;
        }
        let lts: Vec<&[u32]> = self
            .leading_monomials()
            .iter()
            .map(|m| m.exps())
            .filter(|e| e.iter().zip(&bounds) .all(|(x, b)| x < b))
            .collect();
        // walk the box, counting points not above any leading exponent
        let n = bounds.len();
        let mut point = vec![0u32; n];
        let mut count: u64 = 0;
        'outer: loop {
            let standard = !lts
                .iter()
                .any(|lt| lt.iter().zip(&point).all(|(l, p)| l <= p));
            if standard {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == n {
                    break 'outer;
                }
                point[i] += 1;
                if point[i] < bounds[i] {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
        }
        Ok(BigUint::from(count))
    }

    /// Krull dimension of S/I: the maximum size of a variable subset
    /// containing the support of no leading term.
    pub fn krull_dimension(&self) -> Result<usize> {
        if self.is_unit_ideal() {
            return Err(Error::UnitIdeal);
        }
        let n = self.ring.arity();
        if n > 24 {
            return Err(Error::Invalid("dimension computation limited to 24 variables".into()));
        }
        let supports: Vec<u32> = self
            .leading_monomials()
            .iter()
            .map(|m| m.support().iter().fold(0u32, |acc, &i| acc | (1 << i)))
            .collect();
        let mut best = 0usize;
        for subset in 0u32..(1 << n) {
            let size = subset.count_ones() as usize;
            if size <= best {
                continue;
            }
            if supports.iter().all(|s| s & !subset != 0) {
                best = size;
            }
        }
        Ok(best)
    }
}

/// Reduces `f` by the list, top-reduction only or fully. `steps` is the
/// remaining reduction budget.
fn reduce(
    f: &Polynomial,
    basis: &[Polynomial],
    full: bool,
    steps: &mut u64,
) -> Result<Polynomial> {
    let ring = f.ring().clone();
    let field = ring.field;
    let mut work = f.clone();
    let mut done: Vec<Term> = Vec::new();
    'term: while let Some(lt) = work.leading_term() {
        for g in basis {
            let glt = g.leading_term().expect("reducers are nonzero");
            if let Some(qm) = lt.mon.div(&glt.mon) {
                if *steps == 0 {
                    return Err(Error::budget("reduction step limit"));
                }
                *steps -= 1;
                let qc = field.div(lt.coeff, glt.coeff);
                let sub = g.mul_term(qc, &qm)?;
                work = work.sub(&sub)?;
                continue 'term;
            }
        }
        if !full {
            // leading term irreducible; stop here
            break;
        }
        // move the irreducible leading term out and keep reducing the tail
        let lt = lt.clone();
        let tail: Vec<Term> = work.terms()[1..].to_vec();
        done.push(lt);
        work = Polynomial::from_terms(ring.clone(), tail);
    }
    if done.is_empty() {
        return Ok(work);
    }
    done.extend_from_slice(work.terms());
    Ok(Polynomial::from_terms(ring, done))
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Buchberger with normal (degree-then-order) pair selection, the coprime
/// product criterion, and the lcm chain criterion. Returns the unique
/// reduced basis for the ring's order.
pub fn buchberger(gens: &[Polynomial], budget: &Budget) -> Result<GroebnerBasis> {
    let ring = gens
        .first()
        .map(|g| g.ring().clone())
        .ok_or_else(|| Error::Invalid("buchberger needs at least one generator".into()))?;
    for g in gens {
        if g.ring() != &ring {
            return Err(Error::RingMismatch);
        }
    }
    let mut steps = budget.max_reductions;
    let mut stats = GbStats::default();

    let mut basis: Vec<Polynomial> = Vec::new();
    for g in gens {
        if !g.is_zero() {
            basis.push(g.monic());
        }
    }

    let mut pairs: Vec<Pair> = Vec::new();
    let mut processed: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.push(make_pair(&basis, i, j)?);
        }
    }

    while !pairs.is_empty() {
        if stats.spairs >= budget.max_spairs {
            return Err(Error::budget("S-pair limit"));
        }
        // normal selection: smallest lcm degree, then order, then indices
        let mut best = 0usize;
        for k in 1..pairs.len() {
            if pair_less(&ring, &pairs[k], &pairs[best]) {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        processed.insert((pair.i, pair.j));
        stats.spairs += 1;

        let gi = &basis[pair.i];
        let gj = &basis[pair.j];
        let lti = gi.leading_term().unwrap();
        let ltj = gj.leading_term().unwrap();

        // product criterion
        if lti.mon.gcd_is_one(&ltj.mon) {
            continue;
        }
        // chain criterion: some k with LT_k | lcm and both sub-pairs done
        let mut skip = false;
        for (k, g) in basis.iter().enumerate() {
            if k == pair.i || k == pair.j {
                continue;
            }
            let ltk = &g.leading_term().unwrap().mon;
            if ltk.divides(&pair.lcm)
                && processed.contains(&key(pair.i, k))
                && processed.contains(&key(pair.j, k))
            {
                skip = true;
                break;
            }
        }
        if skip {
            continue;
        }

        let mi = pair.lcm.div(&lti.mon).expect("lcm divisible by its factor");
        let mj = pair.lcm.div(&ltj.mon).expect("lcm divisible by its factor");
        let spoly = gi.mul_term(1, &mi)?.sub(&gj.mul_term(1, &mj)?)?;
        stats.reductions += 1;
        let red = reduce(&spoly, &basis, false, &mut steps)?;
        if red.is_zero() {
            continue;
        }
        let red = red.monic();
        let new_index = basis.len();
        basis.push(red);
        for k in 0..new_index {
            pairs.push(make_pair(&basis, k, new_index)?);
        }
    }

    let elements = reduce_basis(basis, &mut steps)?;
    Ok(GroebnerBasis { ring, elements, stats })
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b { (a, b) } else { (b, a) }
}

fn make_pair(basis: &[Polynomial], i: usize, j: usize) -> Result<Pair> {
    let a = &basis[i].leading_term().unwrap().mon;
    let b = &basis[j].leading_term().unwrap().mon;
    Ok(Pair { i, j, lcm: a.lcm(b) })
}

fn pair_less(ring: &Arc<PolyRing>, a: &Pair, b: &Pair) -> bool {
    match a.lcm.total_degree().cmp(&b.lcm.total_degree()) {
        Ordering::Less => return true,
        Ordering::Greater => return false,
        Ordering::Equal => {}
    }
    match ring.order.cmp(&a.lcm, &b.lcm) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => (a.i, a.j) < (b.i, b.j),
    }
}

/// Minimalizes and auto-reduces a basis, returning monic elements sorted by
/// decreasing leading term.
fn reduce_basis(mut basis: Vec<Polynomial>, steps: &mut u64) -> Result<Vec<Polynomial>> {
    basis.retain(|g| !g.is_zero());
    if basis.is_empty() {
        return Ok(basis);
    }
    let ring = basis[0].ring().clone();
    // minimal generators of the leading-term ideal
    basis.sort_by(|a, b| {
        ring.order.cmp(&a.leading_term().unwrap().mon, &b.leading_term().unwrap().mon)
    });
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis.into_iter() {
        let lt = &g.leading_term().unwrap().mon;
        if !minimal.iter().any(|h| h.leading_term().unwrap().mon.divides(lt)) {
            minimal.push(g);
        }
    }
    // autoreduce every element against the others
    let mut reduced: Vec<Polynomial> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let nf = reduce(&minimal[i], &others, true, steps)?;
        debug_assert!(!nf.is_zero(), "minimal element reduced to zero");
        reduced.push(nf.monic());
    }
    reduced.sort_by(|a, b| {
        ring.order.cmp(&b.leading_term().unwrap().mon, &a.leading_term().unwrap().mon)
    });
    Ok(reduced)
}

/// A finitely generated ideal of the ambient ring with a lazily computed,
/// cached reduced Groebner basis. Lazy initialization is once-only, so
/// concurrent readers observe a single basis.
#[derive(Debug)]
pub struct IdealHandle {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
    gb: OnceCell<GroebnerBasis>,
}

impl Clone for IdealHandle {
    fn clone(&self) -> Self {
        IdealHandle { ring: self.ring.clone(), gens: self.gens.clone(), gb: self.gb.clone() }
    }
}

impl IdealHandle {
    pub fn new(ring: Arc<PolyRing>, gens: Vec<Polynomial>) -> IdealHandle {
        IdealHandle { ring, gens, gb: OnceCell::new() }
    }

    #[inline]
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    #[inline]
    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn groebner(&self, budget: &Budget) -> Result<&GroebnerBasis> {
        if self.gens.is_empty() || self.gens.iter().all(|g| g.is_zero()) {
            return self.gb.get_or_try_init(|| {
                Ok(GroebnerBasis {
                    ring: self.ring.clone(),
                    elements: Vec::new(),
                    stats: GbStats::default(),
                })
            });
        }
        self.gb.get_or_try_init(|| buchberger(&self.gens, budget))
    }

    pub fn contains(&self, f: &Polynomial, budget: &Budget) -> Result<bool> {
        Ok(self.groebner(budget)?.contains(f))
    }

    pub fn colength(&self, budget: &Budget) -> Result<BigUint> {
        self.groebner(budget)?.colength()
    }

    pub fn krull_dimension(&self, budget: &Budget) -> Result<usize> {
        self.groebner(budget)?.krull_dimension()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_poly, parse_poly_list};
    use crate::monomial::MonomialOrder;
    use crate::PrimeField;

    fn gb(ring: &Arc<PolyRing>, gens: &str) -> GroebnerBasis {
        let gens = parse_poly_list(ring, gens).unwrap();
        buchberger(&gens, &Budget::default()).unwrap()
    }

    #[test]
    fn elimination_produces_the_expected_relation() {
        // {x^2 - y, x^3 - z} under lex(x > y > z) over F_5.
        // Hand S-pair chain: x*f1 - f2 = xy - z; y*f1 - x*(xy - z) = xz - y^2;
        // z*(xy - z) - y*(xz - y^2) = y^3 - z^2.
        let field = PrimeField::new(5).unwrap();
        let ring = PolyRing::new(
            field,
            vec!["x".into(), "y".into(), "z".into()],
            MonomialOrder::lex(3),
        )
        .unwrap();
        let basis = gb(&ring, "x^2 - y, x^3 - z");
        let expected = parse_poly(&ring, "y^3 - z^2").unwrap();
        assert!(
            basis.elements().iter().any(|g| *g == expected),
            "basis misses y^3 - z^2: {:?}",
            basis.elements().iter().map(|g| g.to_string()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn already_reduced_input_is_kept() {
        let ring = PolyRing::grevlex(7, &["x", "y"]).unwrap();
        let basis = gb(&ring, "x, y");
        let x = parse_poly(&ring, "x").unwrap();
        let y = parse_poly(&ring, "y").unwrap();
        assert_eq!(basis.elements(), &[x, y]);
    }

    #[test]
    fn zero_ideal_gives_empty_basis() {
        let ring = PolyRing::grevlex(3, &["x", "y"]).unwrap();
        let zero = Polynomial::zero(ring.clone());
        let handle = IdealHandle::new(ring, vec![zero]);
        let basis = handle.groebner(&Budget::default()).unwrap();
        assert!(basis.is_zero_ideal());
    }

    #[test]
    fn normal_form_membership_and_remainders() {
        let ring = PolyRing::grevlex(5, &["x", "y"]).unwrap();
        let basis = gb(&ring, "x");
        assert!(basis.normal_form(&parse_poly(&ring, "x^2").unwrap()).is_zero());
        let f = parse_poly(&ring, "y + 1").unwrap();
        assert_eq!(basis.normal_form(&f), f);
        // one division step: x^3 = x*(x^2 - y) + x*y
        let basis = gb(&ring, "x^2 - y");
        let nf = basis.normal_form(&parse_poly(&ring, "x^3").unwrap());
        assert_eq!(nf, parse_poly(&ring, "x*y").unwrap());
    }

    #[test]
    fn normal_form_is_idempotent() {
        let ring = PolyRing::grevlex(3, &["x", "y"]).unwrap();
        let basis = gb(&ring, "x^2 - y, y^2");
        for src in ["x^3 + x*y + y + 2", "x^5", "x*y^2 + x^2*y"] {
            let f = parse_poly(&ring, src).unwrap();
            let nf = basis.normal_form(&f);
            assert_eq!(basis.normal_form(&nf), nf);
        }
    }

    #[test]
    fn colength_of_bracket_box_is_q_squared() {
        let ring = PolyRing::grevlex(3, &["x", "y"]).unwrap();
        for q in [3u32, 9, 27] {
            let basis = gb(&ring, &format!("x^{q}, y^{q}"));
            assert_eq!(basis.colength().unwrap(), BigUint::from(q * q));
        }
    }

    #[test]
    fn colength_of_maximal_ideal_is_one() {
        let ring = PolyRing::grevlex(5, &["x", "y"]).unwrap();
        assert_eq!(gb(&ring, "x, y").colength().unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn colength_counts_the_staircase() {
        // standard monomials of (x^2, x y, y^3): 1, x, y, y^2
        let ring = PolyRing::grevlex(5, &["x", "y"]).unwrap();
        assert_eq!(gb(&ring, "x^2, x*y, y^3").colength().unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn colength_rejects_positive_dimension() {
        let ring = PolyRing::grevlex(5, &["x", "y"]).unwrap();
        assert!(matches!(
            gb(&ring, "x").colength(),
            Err(Error::NotZeroDimensional(v)) if v == "y"
        ));
    }

    #[test]
    fn colength_is_order_independent() {
        let grev = PolyRing::grevlex(3, &["x", "y", "z"]).unwrap();
        let lex = grev.with_order(MonomialOrder::lex(3));
        for gens in ["x^3, y^3, z^3, x*y - z^2", "x^2 + y, y^2 + z, z^2", "x^4, y^2, z^3, x*y*z"] {
            let a = gb(&grev, gens).colength().unwrap();
            let list = parse_poly_list(&lex, gens).unwrap();
            let b = buchberger(&list, &Budget::default()).unwrap().colength().unwrap();
            assert_eq!(a, b, "order dependence on {gens}");
        }
    }

    #[test]
    fn colength_is_antitone_in_the_ideal() {
        let ring = PolyRing::grevlex(3, &["x", "y"]).unwrap();
        let small = gb(&ring, "x^3, y^3");
        let big = gb(&ring, "x^3, y^3, x*y");
        assert!(small.colength().unwrap() > big.colength().unwrap());
    }

    #[test]
    fn kunz_flatness_in_the_ambient_ring() {
        // regularity: colength(I^{[q]}) = q^n * colength(I) for q = p, p^2
        let ring = PolyRing::grevlex(2, &["x", "y"]).unwrap();
        for gens in ["x^2, x*y + y^3, y^4", "x + y, y^2", "x^3, y^3, x*y^2 + x^2"] {
            let ideal = parse_poly_list(&ring, gens).unwrap();
            let base = buchberger(&ideal, &Budget::default()).unwrap().colength().unwrap();
            for e in [1u32, 2] {
                let q = 2u64.pow(e);
                let powered: Vec<Polynomial> =
                    ideal.iter().map(|g| g.frobenius_power(e).unwrap()).collect();
                let col = buchberger(&powered, &Budget::default()).unwrap().colength().unwrap();
                assert_eq!(col, base.clone() * BigUint::from(q.pow(2)), "q = {q} on {gens}");
            }
        }
    }

    #[test]
    fn krull_dimension_examples() {
        let ring = PolyRing::grevlex(3, &["x", "y", "z"]).unwrap();
        assert_eq!(gb(&ring, "x*y - z^2").krull_dimension().unwrap(), 2);

        let handle = IdealHandle::new(ring.clone(), vec![Polynomial::zero(ring.clone())]);
        assert_eq!(handle.krull_dimension(&Budget::default()).unwrap(), 3);

        let ring2 = PolyRing::grevlex(3, &["x", "y"]).unwrap();
        assert_eq!(gb(&ring2, "x, y").krull_dimension().unwrap(), 0);
        assert!(matches!(gb(&ring2, "x, 1 + y, y").krull_dimension(), Err(Error::UnitIdeal)));
    }

    #[test]
    fn budget_is_enforced() {
        // leading terms share x, so the S-pair genuinely reduces
        let ring = PolyRing::grevlex(5, &["x", "y", "z"]).unwrap();
        let gens = parse_poly_list(&ring, "x^2 - y, x^3 - z").unwrap();
        let tiny = Budget { max_reductions: 0, max_spairs: 200_000 };
        assert!(matches!(buchberger(&gens, &tiny), Err(Error::BudgetExceeded { .. })));
        let no_pairs = Budget { max_reductions: 1_000_000, max_spairs: 0 };
        assert!(matches!(buchberger(&gens, &no_pairs), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn gb_caching_returns_the_same_basis() {
        let ring = PolyRing::grevlex(5, &["x", "y"]).unwrap();
        let gens = parse_poly_list(&ring, "x^2 - y, y^2").unwrap();
        let handle = IdealHandle::new(ring, gens);
        let a = handle.groebner(&Budget::default()).unwrap() as *const GroebnerBasis;
        let b = handle.groebner(&Budget::default()).unwrap() as *const GroebnerBasis;
        assert_eq!(a, b);
    }

    #[test]
    fn reduced_basis_is_deterministic_and_canonical() {
        let ring = PolyRing::grevlex(7, &["x", "y", "z"]).unwrap();
        // same ideal, generators given in different forms
        let a = gb(&ring, "x + y, y^2 - z, z^3");
        let b = gb(&ring, "y^2 - z, 2*x + 2*y, z^3, x + y + z^3");
        assert_eq!(a.elements(), b.elements());
        for g in a.elements() {
            assert!(g.is_normalized());
            assert_eq!(g.leading_term().unwrap().coeff, 1);
        }
    }
}
