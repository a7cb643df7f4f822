use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid partition {0:?}: parts must be positive and weakly decreasing")]
    InvalidPartition(Vec<u32>),

    #[error("invalid Gel'fand-Tsetlin pattern: {0}")]
    InvalidPattern(String),

    /// A selection rule was violated inside a formula that the rules are
    /// supposed to protect (zero denominator, negative radicand).
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("resource cap exceeded: {what} = {value} > {cap}")]
    ResourceCap { what: &'static str, value: u128, cap: u128 },

    #[error("schedule evaluated outside its domain at t = {t} (domain [{t_min}, {t_max}])")]
    ScheduleDomain { t: f64, t_min: f64, t_max: f64 },

    #[error("step size underflow at t = {t}: dt = {dt:e} < {dt_min:e}")]
    StepUnderflow { t: f64, dt: f64, dt_min: f64 },

    #[error("trace drift {drift:e} at t = {t} exceeds {limit:e}")]
    TraceDrift { t: f64, drift: f64, limit: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid model:\n  {}", .0.join("\n  "))]
    InvalidModel(Vec<String>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
