use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("series {id}: non-finite value at time {time}")]
    NonFinite { id: String, time: i64 },
    #[error("series {id}: start time {start} must be >= 1")]
    BadStart { id: String, start: i64 },
    #[error("duplicate series id {0}")]
    DuplicateId(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no admissible warping path for lengths {n} x {m}")]
    InfeasibleWarping { n: usize, m: usize },
    #[error("series {id} too short: {len} observations, need {need}")]
    TooShort { id: String, len: usize, need: usize },
    #[error("optimisation failed: {0}")]
    Optimization(&'static str),
    #[error("rank deficient design: {0}")]
    RankDeficient(&'static str),
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
    #[error("zero scale in benchmark errors at position {position}")]
    ZeroScale { position: usize },
    #[error("unknown series id {0}")]
    UnknownId(String),
    #[error("partitions are over different id sets")]
    UniverseMismatch,
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
