use thiserror::Error;

/// Errors raised by the library. Every scalar routine is total over its
/// declared domain and reports violations here instead of returning NaN.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("invalid q = {0}: must be finite and in [0, 1e6]")]
    InvalidQ(f64),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {detail}")]
    AlphabetMismatch { detail: String },

    #[error("support violation at q = 0: belief has zero mass at truth-support index {index}")]
    SupportViolation { index: usize },

    #[error("indeterminate product -inf*inf at index {index}")]
    Indeterminate { index: usize },

    #[error("size limit exceeded: {what} is {size}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
