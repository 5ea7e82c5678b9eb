use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("cyclic descents are undefined for n = {0}; need n >= 2")]
    CyclicUndefined(usize),

    #[error("{name} = {value} is out of range ({allowed})")]
    OutOfRange {
        name: &'static str,
        value: String,
        allowed: String,
    },

    #[error("permutation has {found} symbols but the measure is on S_{expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("alpha = {0} is outside the convergence region alpha > 1/(2 pi)")]
    AlphaOutOfRange(f64),

    #[error("lambda must be positive and finite (got {0})")]
    BadLambda(f64),

    #[error("conditioning on d = {0}, which has probability zero")]
    ZeroProbability(u64),

    #[error("2^{0} does not fit in a 64-bit pile count")]
    ShuffleCountOverflow(u32),

    #[error("sample too small: {0}")]
    UndersizedSample(String),

    #[error("masses sum to {0}, not 1")]
    NotNormalized(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        allowed: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            allowed: allowed.to_string(),
        }
    }
}
