use thiserror::Error;

/// Every failure surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mantissa must carry at least 128 bits, got {0}")]
    Precision(u32),

    #[error("singular system: pivot {pivot:e} below tolerance in column {column}")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("non-finite value while evaluating at {0}")]
    Evaluation(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("multi-index ({n1}, {n2}) is not normal: {reason}")]
    NormalityFailure { n1: usize, n2: usize, reason: String },

    #[error("internal inconsistency: {0} (raise the mantissa size)")]
    InternalInconsistency(String),

    #[error("zero count mismatch on interval {interval}: expected {expected}, found {found}")]
    ZeroLocationFailure { interval: usize, expected: usize, found: usize },

    #[error("point outside the admissible domain: {0}")]
    Domain(String),

    #[error("solve failed: {0}")]
    SolveFailure(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("sheet classification failed at {at}; retry with step below {suggested_step:e}")]
    Classification { at: String, suggested_step: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e}); try a larger Im z")]
    Convergence { iterations: usize, residual: f64 },

    #[error("coefficient source has no entry at ({n1}, {n2})")]
    Source { n1: usize, n2: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
