//! Exact computation of Frobenius-theoretic invariants of quotients of
//! polynomial rings over prime fields: Hilbert-Kunz functions and
//! multiplicities, F-splitting numbers and F-signature, relative
//! Hilbert-Kunz differences, tight-closure membership evidence, the
//! F-splitting prime/ratio, and F-signature of ideal pairs.
//!
//! Everything is computed over k = F_p with exact lengths (colengths of
//! zero-dimensional ideals counted as standard monomials); limits are
//! estimated from the exact per-`e` tables with a two-term growth model.

pub mod error;
pub mod field;
pub mod monomial;
pub mod poly;
pub mod expr;
pub mod groebner;
pub mod quotient;
pub mod table;
pub mod invariants;
pub mod pairs;
pub mod ringfile;
pub mod report;
pub mod run;

pub use error::{Error, Result};
pub use field::PrimeField;
pub use groebner::{Budget, GroebnerBasis, IdealHandle};
pub use monomial::{Monomial, MonomialOrder, OrderKind};
pub use poly::{PolyRing, Polynomial};
pub use quotient::{QuotientIdeal, RingPresentation};
pub use table::{Estimate, InvariantTable, TableKind, TableRow};

/// Engine identification used in reports.
pub const ENGINE_VERSION: &str = concat!("kunzite ", env!("CARGO_PKG_VERSION"));
