use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a supported prime (need a prime p with 2 <= p <= 17)")]
    UnsupportedPrime(u64),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("p^n = {0} exceeds the dense-operation cap of 2^26 points")]
    OrderTooLarge(u128),
    #[error("element index {index} out of range for a group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("digit {digit} is not a residue mod {p}")]
    InvalidDigit { digit: u8, p: u8 },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands belong to different group contexts")]
    ContextMismatch,
    #[error("the zero functional does not define a hyperplane")]
    ZeroFunctional,
    #[error("transversal of size p^{codim} exceeds the enumeration budget")]
    TransversalBudget { codim: usize },
    #[error("cannot take the characteristic measure of the empty set")]
    EmptySet,
    #[error("requested {count} cosets but the subspace has only {available}")]
    TooManyCosets { count: usize, available: usize },
    #[error("perturbation constraint unsatisfiable at the requested rate: |A \u{394} A'| = {achieved} exceeds the cap {cap}")]
    PerturbationTooLarge { achieved: usize, cap: usize },
    #[error("tree witness maps are incomplete: expected {expected} entries at height {d}, got {got}")]
    IncompleteTree { d: usize, expected: usize, got: usize },
    #[error("unknown fixture name {0:?}")]
    UnknownFixture(String),
    #[error("invalid fixture parameters: {0}")]
    InvalidFixtureParams(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
