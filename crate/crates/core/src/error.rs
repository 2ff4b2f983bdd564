use thiserror::Error;

pub type Result<T> = std::result::Result<T, EmdError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmdError {
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("span {span} is not an integer multiple of dt = {dt}")]
    NonIntegerSpan { span: f64, dt: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid tone recipe: {0}")]
    InvalidRecipe(String),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("signal has no maximum/minimum pair")]
    NoExtrema,
    #[error("duplicate knot at t = {0}")]
    DuplicateKnot(f64),
    #[error("knot times must be strictly increasing (violated at index {0})")]
    UnorderedKnots(usize),
    #[error("need at least {needed} knots, got {got}")]
    TooFewKnots { needed: usize, got: usize },
    #[error("{knots} knots cannot be split into degree-{degree} segments")]
    SegmentMismatch { knots: usize, degree: usize },
    #[error("unsupported Lagrange degree {0} (expected 1, 2 or 3)")]
    UnsupportedDegree(usize),
    #[error("t = {t} outside interpolant domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },
    #[error("too few extrema to sift ({maxima} maxima, {minima} minima)")]
    InsufficientExtrema { maxima: usize, minima: usize },
    #[error("invalid sifting configuration: {0}")]
    InvalidConfig(String),
    #[error("interval [{lo}, {hi}] outside signal span [{start}, {end}]")]
    IntervalOutOfRange {
        lo: f64,
        hi: f64,
        start: f64,
        end: f64,
    },
    #[error("could not bracket a root near t = {0}")]
    RootBracketFailure(f64),
    #[error("frequency ratio {0} has no small rational representation")]
    IrrationalRatio(f64),
    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },
}
