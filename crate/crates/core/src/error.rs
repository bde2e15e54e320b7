use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as a rational: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    /// A precondition of an operation does not hold for the given arguments.
    #[error("{0}")]
    Precondition(String),

    /// Common denominator of the allocation exceeds the exact DP state cap.
    #[error("common denominator {denominator} exceeds the state cap {cap}; use coarser amounts")]
    DenominatorTooLarge { denominator: String, cap: u64 },

    #[error("{what}: size {size} exceeds the cap {cap}{hint}")]
    TooLarge {
        what: &'static str,
        size: String,
        cap: u64,
        hint: &'static str,
    },
}
