//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{msg}")]
pub struct ParseError {
    msg: String,
}

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError { msg: msg.into() }
    }
}

/// Failures while enumerating or persisting a domain table.
#[derive(Debug, Error)]
pub enum TableError {
    #[error("live frontier exceeded the configured bound of {limit} nodes")]
    ResourceLimit { limit: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt table file: {0}")]
    Corrupt(String),
    #[error("unsupported machine id {found:?}; this build only reads {expected:?}")]
    Version { found: String, expected: String },
    #[error("malformed table file: {0}")]
    Malformed(String),
}

/// Failures in table queries.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("no enumeration available for condition {condition}")]
    MissingTable { condition: String },
    #[error("bit string is not a prefix of the halting probability: {0}")]
    InvalidPrefix(String),
    #[error("argument {value} out of range: {what}")]
    OutOfRange { value: u64, what: String },
}

/// Failures in sophistication derivations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SophError {
    #[error("no witness for {x} within the restricted system; K is unknown")]
    UnknownK { x: String },
    #[error("{x} carries zero semimeasure mass")]
    ZeroMass { x: String },
    #[error("statistic P_{k} is empty: t_{k} and t_{} coincide", k - 1)]
    EmptyStatistic { k: u32 },
    #[error("statistic index {k} out of range 1..={max}")]
    StatisticRange { k: u32, max: u32 },
    #[error("function domain is not prefix-free: {a} is a prefix of {b}")]
    NonPrefixFreeDomain { a: String, b: String },
}
