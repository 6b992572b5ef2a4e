use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance too large: {what} = {value} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("state already carries a field ancilla (dimension {0})")]
    AncillaPresent(usize),

    #[error("expected a {expected} basis state")]
    WrongBasis { expected: &'static str },

    #[error("conditioning on an outcome of probability {0:e}")]
    NullConditioning(f64),

    #[error("no timing information: probability amplitude is {0}")]
    NoTimingInformation(f64),

    #[error("not an X state: entry ({row},{col}) has magnitude {magnitude:e}")]
    NotXState { row: usize, col: usize, magnitude: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason,
        }
    }
}
