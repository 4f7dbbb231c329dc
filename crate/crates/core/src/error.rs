use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: expected {expected} symbols, got {actual}")]
    AlphabetMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("size limit exceeded: {what} needs {needed}, cap is {cap}")]
    SizeExceeded { what: String, needed: usize, cap: usize },

    #[error("unknown output factor {factor} (channel has {factors} factors)")]
    UnknownFactor { factor: usize, factors: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("no edge labelled `{0}`")]
    MissingEdge(String),

    #[error("state model mismatch: {0}")]
    ModelMismatch(String),

    #[error("verdict undetermined for the network {side} the removed edge")]
    Undetermined { side: &'static str },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("region is unbounded along {0}")]
    UnboundedRegion(String),

    #[error("channel is not symmetrizable; no spoofing witness is available")]
    NotSymmetrizable,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
