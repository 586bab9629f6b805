use thiserror::Error;

/// Errors raised by the algebraic and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("division is not exact")]
    InexactDivision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("extended exchange matrix does not have full column rank")]
    Rank,
    #[error("element has no unique dominance-maximal exponent")]
    NotPointed,
    #[error("coefficient of the maximal exponent {0} is not 1")]
    NotNormalized(String),
    #[error("incompatible pair: {0}")]
    IncompatiblePair(String),
    #[error("vertex {0} is frozen and cannot be mutated")]
    FrozenMutation(usize),
    #[error("invalid freezing set: {0}")]
    BadFreeze(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("exponent {0} is not dominated by the given degree")]
    Domain(String),
    #[error("positivity fails: {0}")]
    Positivity(String),
    #[error("not sign-coherent: {0}")]
    SignCoherence(String),
    #[error("element is not in the span of the family: {0}")]
    NotInSpan(String),
    #[error("completion is implemented for at most two unfrozen directions, got {0}")]
    UnsupportedRank(usize),
    #[error("base point is not generic: {0}")]
    BadBasePoint(String),
    #[error("path is not generic: {0}")]
    NonGenericPath(String),
    #[error("scattering completion failed: {0}")]
    Scattering(String),
    #[error("nothing found up to depth {0}")]
    NotFound(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
