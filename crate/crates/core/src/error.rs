//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),

    #[error("operands live in different rings")]
    RingMismatch,

    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),

    #[error("computation budget exhausted: {context}")]
    BudgetExceeded {
        context: String,
        /// Rows finished before the budget ran out, when a table was being built.
        partial: Option<Box<crate::table::InvariantTable>>,
    },

    #[error("ideal is not zero-dimensional: variable {0} has no pure power among leading terms")]
    NotZeroDimensional(String),

    #[error("ideal is the unit ideal")]
    UnitIdeal,

    #[error("socle has dimension {0} > 1, quotient is not Gorenstein")]
    NotIrreducible(usize),

    #[error("parameter ideal is not irreducible (socle dimension {0}); Gorenstein hypothesis fails")]
    NotGorenstein(usize),

    #[error("no system of parameters found after {0} attempts; supply one explicitly")]
    SOPNotFound(usize),

    #[error("estimate needs at least 3 table rows, got {0}")]
    InsufficientSamples(usize),

    #[error("chain exhausted before stabilization at e = {e}; best value {best}")]
    ChainExhausted { e: u32, best: String },

    #[error("internal length identity violated at e = {e}: {details}")]
    IdentityViolation { e: u32, details: String },

    #[error("sequence hypothesis violated at e = {e}: the e-th Frobenius power of the maximal ideal is not contained in the supplied ideal")]
    HypothesisViolation { e: u32 },

    #[error("ring is not F-pure: no splitting exists at e = 1")]
    NotFPure,

    #[error("defining ideal is not a nonzero principal ideal")]
    NotHypersurface,

    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn budget(context: impl Into<String>) -> Self {
        Error::BudgetExceeded { context: context.into(), partial: None }
    }

    /// Process exit code class used by the CLI and the C API.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParseError { .. }
            | Error::UnknownVariable(_)
            | Error::NonPrimeModulus(_)
            | Error::Io(_)
            | Error::Invalid(_) => 1,
            Error::BudgetExceeded { .. } | Error::ChainExhausted { .. } => 3,
            _ => 2,
        }
    }
}
