use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("a diamond network needs at least {min} relay(s), got {got}")]
    TooFewRelays { min: usize, got: usize },

    #[error("relay set must not be empty")]
    EmptySubset,

    #[error("relay index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid link capacity {0} (must be finite and non-negative)")]
    InvalidCapacity(f64),

    #[error("invalid capacity range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("mask width mismatch: expected {expected} relays, got {got}")]
    MaskWidth { expected: usize, got: usize },

    #[error("mask {bits:#b} has bits beyond width {width}")]
    MaskBits { bits: u32, width: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid cut family: {0}")]
    InvalidCuts(String),

    #[error("invalid set family: {0}")]
    InvalidFamily(String),

    #[error("{what}: n = {n} exceeds the guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        guard: usize,
    },

    #[error("target size k = {k} out of range 1..={n}")]
    InvalidK { k: usize, n: usize },

    #[error("linear program failed: {0}")]
    Lp(#[from] crate::lp::LpError),

    #[error("no schedule with support <= {max_support} reaches {target}")]
    SparseScheduleNotFound { max_support: usize, target: f64 },

    #[error("guarantee violated: {0}")]
    GuaranteeViolated(String),

    #[error("parse error: {0}")]
    Parse(String),
}
