use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line direction must be nonzero")]
    ZeroDirection,
    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("duplicate line at index {0}")]
    DuplicateLine(usize),
    #[error("r must be at least 2 (got {0})")]
    RichnessTooSmall(u64),
    #[error("Prop applies only for r > 2L^{{1/2}} (r = {r}, L = {lines})")]
    BigRPrecondition { r: u64, lines: usize },
    #[error("brute-force census capped at {cap} points (got {n}); use the rich-point census")]
    CensusCapExceeded { n: usize, cap: usize },
    #[error("polynomials share the factor {0}; the line bound does not apply")]
    CommonFactor(String),
    #[error("partition degree must be at least {min} (got {got})")]
    DegreeTooSmall { got: u32, min: u32 },
    #[error("partition needs at least {min} points (got {got})")]
    TooFewPoints { got: usize, min: usize },
    #[error("point set does not match the partition ({0})")]
    PartitionMismatch(String),
    #[error("parameter gate violated: {0}")]
    ParameterGate(String),
    #[error("invalid instance parameters: {0}")]
    InvalidInstance(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
