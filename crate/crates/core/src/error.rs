use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("field order {0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported bound 2^62")]
    ModulusTooLarge(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{what} = {dim} is not divisible by {parts}")]
    IndivisibleDimensions {
        what: &'static str,
        dim: usize,
        parts: usize,
    },
    #[error("derivative order {order} is out of range for m = {m}")]
    InvalidOrder { order: usize, m: usize },
    #[error("field of order {q} cannot supply {n} distinct evaluation points")]
    FieldTooSmall { q: u64, n: usize },
    #[error("failure bound numerator {0} is odd; the bound is not an integer")]
    NonIntegerBound(u64),
    #[error("upload budget {0} is too small (need at least 2 partitions)")]
    BudgetTooSmall(usize),
    #[error("worker {worker} returned order {order} without all lower orders")]
    OrderViolation { worker: usize, order: usize },
    #[error("duplicate result for worker {worker}, order {order}")]
    DuplicateResult { worker: usize, order: usize },
    #[error("need {need} responses to decode, got {got}")]
    NotEnoughResponses { got: usize, need: usize },
    #[error("interpolation matrix is singular for these evaluation points")]
    DecodeSingular,
    #[error("evaluation points are not pairwise distinct")]
    DuplicatePoints,
    #[error("instance too large to enumerate: {0}")]
    TooLargeToEnumerate(String),
    #[error("no recovery threshold case applies: {0}")]
    UnsupportedRegime(String),
    #[error("{capacity} sub-tasks available but the threshold is {threshold}")]
    Incompletable { capacity: usize, threshold: usize },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("malformed binary frame: {0}")]
    Wire(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
