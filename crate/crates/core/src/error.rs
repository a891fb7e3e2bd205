use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid truncation parameters: {0}")]
    InvalidParams(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("span is not invariant under the operator: {0}")]
    Invariance(String),

    /// A singular value sits within one order of magnitude of the rank threshold.
    #[error(
        "ambiguous numerical rank: singular value {sigma:e} lies within a decade of the threshold {threshold:e}; \
         adjust --tol or use exact mode"
    )]
    RankAmbiguity { sigma: f64, threshold: f64 },

    #[error("enumeration cap exceeded: {bits} channel bits > cap {cap} (use sampling mode)")]
    Cap { bits: usize, cap: usize },

    #[error("invalid symbol: {0}")]
    Symbol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
