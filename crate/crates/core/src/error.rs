use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curvature vector: {0}")]
    InvalidKappa(String),

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("order {k} out of range for dimension {n}")]
    OrderOutOfRange { k: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the cone {cone}: {witness}")]
    ConeViolation { cone: String, witness: String },

    #[error("combined functions must share a defining cone ({left} vs {right})")]
    ConeMismatch { left: String, right: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("r = {r} lies outside the ambient domain [0, {r_max})")]
    DomainError { r: f64, r_max: f64 },

    #[error("frame is not unit length: |r_tan|^2 + r_nu^2 = {norm_sq}")]
    FrameError { norm_sq: f64 },

    #[error("orbit radius {w} below axis threshold")]
    AxisSingularity { w: f64 },

    #[error("difference quotient for {quantity} not converged at s = {s} (estimate {estimate:e})")]
    ResolutionError { quantity: String, s: f64, estimate: f64 },

    #[error("support function u = {u} is not positive")]
    NonpositiveSupport { u: f64 },

    #[error("no root in the bracket [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("the slice equation vanishes identically on [{lo}, {hi}]")]
    DegenerateFamily { lo: f64, hi: f64 },

    #[error("could not bracket the profile curvature: {0}")]
    RootBracketFailure(String),

    #[error("step size underflow at s = {s}")]
    StepFailure { s: f64 },

    #[error("expression parse error: {0}")]
    Parse(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
