use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: expected {expected} steps, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: u64 },

    #[error("estimator variance blow-up: relative stderr {relative:.3e} exceeds {limit:.3e}")]
    VarianceBlowUp { relative: f64, limit: f64 },

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("shift of {shift} is not an integer number of grid steps of {step}")]
    OffGridShift { shift: f64, step: f64 },

    #[error("shifted window leaves the sampled support")]
    ShiftOutOfRange,

    #[error("contour offset {epsilon} is below the admissible threshold {threshold}")]
    ContourTooClose { epsilon: f64, threshold: f64 },

    #[error("loop constraint violated: {0}")]
    Constraint(String),

    #[error("multiplier parameter outside the {regime} regime: {reason}")]
    Regime { regime: &'static str, reason: String },

    #[error("operator needs mode {needed} beyond cutoff {cutoff}")]
    CutoffExceeded { needed: usize, cutoff: usize },

    #[error("functional is not an exponential cylinder functional")]
    NotExponential,

    #[error("too many insertions: {found} exceeds bound {bound}")]
    TooManyInsertions { found: usize, bound: usize },

    #[error("divergent edge between insertions {0} and {1}")]
    Divergence(usize, usize),

    #[error("no loop weight given for cycle length {0}")]
    MissingLoopWeight(usize),

    #[error("marked pair ({0}, {1}) is not adjacent")]
    NonAdjacentPair(usize, usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
