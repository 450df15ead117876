#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("cannot apply an operator a negative number of times ({0})")]
    NegativeCount(i64),
    #[error("state is not normalized (norm {0})")]
    NormalizationError(f64),
    #[error("invalid subsystem configuration: {0}")]
    ConfigError(String),
    #[error("column {column} is not a standard basis vector")]
    NotBasisColumns { column: usize },
    #[error("{0} is not a power of two")]
    NonPowerOfTwo(usize),
}
