use thiserror::Error;

use crate::sdp::SdpSolution;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("sequence must be nonempty")]
    EmptySequence,

    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("sequence entry {value} at index {index} is not +1 or -1")]
    NotBinary { index: usize, value: i64 },

    #[error(
        "sequences are not complementary: |R1[k] + R2[k] - 2N delta[k]| = {violation} at lag {lag}"
    )]
    NotComplementary { lag: isize, violation: i64 },

    #[error("unknown window kind `{0}`")]
    UnknownWindow(String),

    #[error("window of kind {kind} needs at least {min} samples, got {got}")]
    WindowTooShort {
        kind: &'static str,
        min: usize,
        got: usize,
    },

    #[error("total null order K = k0 + 2*sum(k_i) = {total} violates K <= M-1 for M = {m}")]
    NullOrderTooHigh { total: usize, m: usize },

    #[error("invalid null specification: {0}")]
    InvalidNullSpec(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "SDP solver stopped after {} iterations without reaching tolerance (relative gap {:.3e})",
        .best.iterations, .best.residuals.relative_gap
    )]
    SdpNotConverged { best: Box<SdpSolution> },

    #[error("degenerate design: {0}")]
    Degenerate(String),

    #[error("analysis failed: {0}")]
    Analysis(String),

    #[error("invalid design document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
