use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violates a type invariant or an operation precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The family is not on the critical boundary |c1 - c2| = 1.
    #[error("family (c1={c1}, c2={c2}) is off the critical boundary |c1 - c2| = 1")]
    OffCriticalBoundary { c1: f64, c2: f64 },

    #[error("zero seed pair only generates the trivial solution")]
    ZeroSeed,

    /// A division guard fired (recurrence, reconstruction or Riccati step).
    #[error("singular step at n = {index}: {what}")]
    Singular { index: usize, what: String },

    /// beta_n >= 0, so sqrt(-beta_n) is not real at this index.
    #[error("beta_{index}({lambda}) = {beta} is not negative")]
    NonNegativeBeta {
        index: usize,
        lambda: f64,
        beta: f64,
    },

    /// Index below the admissible range of the Poincare coefficients.
    #[error("index {index} is below the admissible index {min}")]
    BelowAdmissible { index: usize, min: usize },

    /// The envelope scan found no valid start index below its cap.
    #[error("no valid start index below {cap} (lambda = {lambda}): {diagnostic}")]
    ScanCapExceeded {
        cap: usize,
        lambda: f64,
        diagnostic: String,
    },

    #[error("backward limit not monotone in s at n = {index}: drop {drop:e}")]
    NonMonotone { index: usize, drop: f64 },

    #[error("no sign change of the boundary defect on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("insufficient data: {0}")]
    Insufficient(String),
}
