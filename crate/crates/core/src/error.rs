use alloc::string::String;

/// Errors raised by the algorithms in this crate.
///
/// Every variant maps onto a stable machine-readable code through
/// [`Error::reason`], which the command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate subset is empty")]
    EmptySubset,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("exponent must be at least 1, got {0}")]
    BadExponent(f64),
    #[error("constant out of range: {0}")]
    BadConstant(f64),
    #[error("selector mean must lie in (0, 1], got {0}")]
    BadDelta(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("{what}: size {requested} exceeds cap {limit} (estimated cost {cost:.3e})")]
    SizeCap {
        what: &'static str,
        requested: usize,
        limit: usize,
        cost: f64,
    },
    #[error("norm not supported in exact mode")]
    UnsupportedNorm,
    #[error("linear program solver failed: {0}")]
    Solver(&'static str),
}

impl Error {
    /// Stable upper-case reason code.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::EmptySubset => "EMPTY_SUBSET",
            Error::Dimension { .. } => "DIMENSION",
            Error::BadExponent(_) => "BAD_EXPONENT",
            Error::BadConstant(_) => "BAD_CONSTANT",
            Error::BadDelta(_) => "BAD_DELTA",
            Error::BadEpsilon(_) => "BAD_EPSILON",
            Error::BadInput(_) => "BAD_INPUT",
            Error::SizeCap { .. } => "SIZE_CAP",
            Error::UnsupportedNorm => "UNSUPPORTED_NORM",
            Error::Solver(_) => "SOLVER",
        }
    }

    pub(crate) fn bad_input(msg: impl Into<String>) -> Self {
        Error::BadInput(msg.into())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
