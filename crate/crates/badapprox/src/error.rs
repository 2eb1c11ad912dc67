use num_bigint::BigInt;

/// Crate-wide error type.
///
/// Every fallible operation distinguishes bad input (`InvalidArgument`,
/// `DimensionMismatch`, `Parse`) from an honest "cannot decide at this
/// precision" (`PrecisionInsufficient`, `CfPrecision`) and from a broken
/// internal invariant (`Internal`). The command-line front end maps these
/// onto distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    /// A continued-fraction expansion of an approximate input could not
    /// certify the next partial quotient. Carries the prefix that *was*
    /// certified, starting with the integer part.
    #[error("precision insufficient after {} certified terms: {detail}", certified.len())]
    CfPrecision { detail: String, certified: Vec<BigInt> },

    #[error("internal invariant violation: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Exit status used by the `badapprox` binary: 2 for validation
    /// problems, 3 for precision shortfalls, 4 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PrecisionInsufficient(_) | Error::CfPrecision { .. } => 3,
            Error::Internal(_) => 4,
            _ => 2,
        }
    }
}
