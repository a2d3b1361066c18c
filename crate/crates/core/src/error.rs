use thiserror::Error;

use crate::presentation::Word;

/// Errors raised by the group engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("coset limit of {limit} live cosets exceeded (group may be infinite or the limit too small)")]
    CosetLimitExceeded { limit: usize },

    #[error("group order {order} exceeds the materialization cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("relator of {letters} letters exceeds the supported length {max}")]
    RelatorTooLong { letters: u64, max: u64 },

    #[error("internal coset table inconsistency: {0}")]
    InconsistentTable(String),

    #[error("group of order {order} is not a {prime}-group")]
    NotPGroup { order: usize, prime: u64 },

    #[error("primes differ: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("subgroups belong to different parent groups")]
    ParentMismatch,

    #[error("element set is not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("subgroup is not normal: conjugate of {element} by {conjugator} leaves it")]
    NotNormal { element: usize, conjugator: usize },

    #[error("expected {expected} generator images, got {found}")]
    ImageCountMismatch { expected: usize, found: usize },

    #[error("map is not a homomorphism: relation {relation} is violated")]
    RelationViolated { relation: Word },

    #[error("map is not a homomorphism at ({left}, {right})")]
    NotHomomorphism { left: usize, right: usize },

    #[error("lattice cap {cap} exceeded by group of order {order}")]
    LatticeCapExceeded { order: usize, cap: usize },

    #[error("invalid Goursat tuple: {0}")]
    InvalidTuple(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported prime {0} for the builtin catalog")]
    UnsupportedPrime(u64),

    #[error("corpus entry {name}: {reason}")]
    Corpus { name: String, reason: String },

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

/// A presentation file that failed to parse. `position` is a byte offset.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown generator `{name}` at byte {position}")]
    UnknownGenerator { name: String, position: usize },

    #[error("zero exponent at byte {position}")]
    ZeroExponent { position: usize },

    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("cannot infer the prime from the relators; add a `p:` clause")]
    AmbiguousPrime,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
