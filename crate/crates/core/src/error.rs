use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must satisfy 0 < alpha < 0.5, got {0}")]
    Alpha(f64),
    #[error("gamma must satisfy 0 <= gamma <= 1, got {0}")]
    Gamma(f64),
    #[error("stubbornness level must be at least 1")]
    ZeroLevel,
    #[error("this operation needs a finite stubbornness level")]
    InfiniteLevel,
    #[error("honest height m = {m} must be below the level {level}")]
    HonestHeight { level: u32, m: u32 },
    #[error("prefix count i = {i} exceeds n = {n}")]
    PrefixCount { n: u32, i: u32 },
    #[error("confirmation depth k must be at least 1")]
    ZeroConfirmations,
    #[error("generating function argument must lie in [0, 1/4], got {0}")]
    GeneratingArgument(f64),
    #[error("double-spend reward must be a finite nonnegative number, got {0}")]
    Reward(f64),
    #[error("service value V = {value} and fee F = {fee} must satisfy F >= V >= 0")]
    ServiceFee { value: f64, fee: f64 },
    #[error(
        "search reached the cap {cap} without finding the answer \
         (best finite level {best_level}, ratio {best_ratio:.9}, ratio at infinity {infinite_ratio:.9})"
    )]
    CapExceeded {
        cap: u32,
        best_level: u32,
        best_ratio: f64,
        infinite_ratio: f64,
    },
    #[error("{0}")]
    InvalidRequest(String),
}

impl Error {
    /// Diagnostics that are not parameter-domain violations.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
