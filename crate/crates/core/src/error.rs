// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("sequence too short: {len} points, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("precision of {0} bits is below the 53-bit floor")]
    PrecisionTooLow(u32),

    #[error("required precision of {required} bits exceeds the cap of {cap} bits")]
    PrecisionCap { required: u64, cap: u64 },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("cannot parse `{text}` as a finite number")]
    Parse { text: String },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },

    #[error("not a candidate orbit: z_{p} = z_{q} but z_{} != z_{}", p + 1, q + 1)]
    Inconsistent { p: usize, q: usize },

    #[error("|z_{0}| = 1, the log ratio is undefined")]
    UnitModulus(usize),

    #[error("repeated node: w_{i} = w_{j}")]
    RepeatedNode { i: usize, j: usize },

    #[error("invalid periodic orbit: {0}")]
    InvalidSpec(String),

    #[error("iterate overflowed the exponent range at step {step}")]
    Overflow { step: usize },

    #[error("zero modulus at index {0}")]
    ZeroModulus(usize),

    #[error("every image in the tail equals the limit point")]
    IdenticallyLimit,

    #[error("order estimate {p_real:.6} is not an integer (residual {residual:.3e})")]
    NonIntegerOrder { p_real: f64, residual: f64 },

    #[error("log ratios do not settle (spread {spread:.3e})")]
    NoLimit { spread: f64 },

    #[error("leading coefficient vanished")]
    ZeroLeadingCoefficient,

    #[error("too few usable coefficients: {have}, need {need}")]
    TooFewCoefficients { have: usize, need: usize },

    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("pair selection is empty")]
    EmptySelection,

    #[error("no index in the prefix satisfies the Hölder start condition")]
    NoHolderStart,

    #[error("moduli are not strictly decreasing at index {0}")]
    NotDecreasing(usize),

    #[error("|z_{}| <= D|z_{n}| fails (ratio {ratio:.6e})", n + 1)]
    ContractionViolated { n: usize, ratio: f64 },

    #[error("growth condition {side} fails at n = {n}")]
    GrowthConditionViolated { n: usize, side: String },

    #[error("point lies below the smallest covered modulus")]
    BeyondPrefix,

    #[error("{0}")]
    OutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("declared tail does not match the prefix: {0}")]
    TailViolated(String),
}

pub type Result<T> = std::result::Result<T, OrbitError>;
