use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates one of the engine invariants; the message names it.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("mean work vanishes; signal-to-noise quantities are undefined")]
    DegenerateMean,

    #[error("moment order {order} exceeds the supported maximum of {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("dimension {d} exceeds the enumeration cap of {max}")]
    DimensionCap { d: usize, max: usize },

    #[error("index {index} out of range for dimension {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("operation requires the {expected} regime, parameters are in the {found} regime")]
    RegimeMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
