use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resolution {bits} outside the supported range 1..={cap}")]
    ResolutionOutOfRange { bits: u32, cap: u32 },

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("{what} = {value} is out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("invalid Lp exponent {0}: must be >= 1 or `inf`")]
    InvalidExponent(String),

    #[error("weight at k = {k} is negative ({value})")]
    NegativeWeight { k: usize, value: f64 },

    #[error("declared {declared} case contradicts the detected {detected} sequence")]
    CaseMismatch { declared: String, detected: String },

    #[error("weights sum to zero and cannot be normalized")]
    ZeroWeightSum,

    #[error("Cesàro order must exceed -1, got {0}")]
    InvalidCesaroOrder(f64),

    #[error("empty sequence")]
    EmptySequence,

    #[error("kernel decomposition needs a block exponent n >= 1, got {0}")]
    DegenerateBlock(u32),

    #[error("function is not a Walsh polynomial of order below 2^{n} (tail magnitude {tail:e})")]
    NotInPolynomialSpace { n: u32, tail: f64 },

    #[error("need at least {needed} usable points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("exact arithmetic unavailable: {0}")]
    Inexact(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown {what} `{value}`")]
    UnknownSpec { what: &'static str, value: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
