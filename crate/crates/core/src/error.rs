use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live over different variable tables")]
    VarTableMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inner series must have zero constant term")]
    NonzeroConstantTerm,

    #[error("series must have the form x + (higher order terms)")]
    LeadingCoefficient,

    #[error("malformed formal group law: {0}")]
    MalformedFgl(String),

    #[error("window insufficient: requested e-exponents {requested:?}, certified {certified:?}")]
    WindowInsufficient {
        requested: (i32, i32),
        certified: (i32, i32),
    },

    #[error("inhomogeneous input: {0}")]
    Inhomogeneous(String),

    #[error("dimension mismatch in degree {degree}: computed {computed}, expected {expected}")]
    DimensionMismatch {
        degree: i64,
        computed: usize,
        expected: usize,
    },

    #[error("element does not lie in the cobordism subring")]
    NotInSubring,

    #[error("element does not lie in the image of the geometric fixed point map")]
    NotInImage,

    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),
}
