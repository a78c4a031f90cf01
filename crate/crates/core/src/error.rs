use std::fmt;

use num_bigint::BigUint;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("empty set: at least one element is required")]
    EmptySet,

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invalid polynomial system: {0}")]
    InvalidSystem(String),

    #[error("budget exceeded: {what} requires {required}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        required: BigUint,
        limit: BigUint,
    },

    #[error("map is not a bijection onto its image: {0}")]
    NonBijective(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A construction that is proven correct failed its own re-check.
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),

    #[error("power map is not injective: {a} and {b} have the same {t}-th power")]
    SignCollision { a: String, b: String, t: u32 },

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("numerical certification failed: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn budget(what: &'static str, required: impl Into<BigUint>, limit: u64) -> Self {
        Error::BudgetExceeded {
            what,
            required: required.into(),
            limit: BigUint::from(limit),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            msg: msg.to_string(),
        }
    }

    /// True for errors that mean "could not decide within the configured limits".
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::SearchExhausted(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
