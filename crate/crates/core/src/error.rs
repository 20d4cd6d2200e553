use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sample space must contain at least one atom")]
    EmptySpace,
    #[error("duplicate atom label {0:?}")]
    DuplicateAtom(String),
    #[error("credal model needs at least one measure")]
    NoMeasures,
    #[error("measure {measure}: weight of atom {atom} is negative ({weight})")]
    NegativeWeight {
        measure: String,
        atom: usize,
        weight: String,
    },
    #[error("measure {measure}: weights sum to {sum}, expected 1")]
    WeightSum { measure: String, sum: String },
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("atom index {index} out of range for a space of {size} atoms")]
    InvalidAtom { index: usize, size: usize },
    #[error("unknown atom label {0:?}")]
    UnknownAtom(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("missing limit: {0}")]
    MissingLimit(String),
    #[error("domination violated at atom {atom} for n = {n}: |X_n| = {value} > Y = {bound}")]
    DominationViolated {
        atom: usize,
        n: String,
        value: String,
        bound: String,
    },
    #[error("index {n} is outside the tabulated range 1..={len}")]
    OutOfRange { n: String, len: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown rate family {found:?}; supported families: {supported}")]
    UnknownFamily { found: String, supported: String },
    #[error("unresolved name {0:?}")]
    DanglingName(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
