use std::fmt;

use crate::syntax::Span;

use super::types::LinearType;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind} (rule {rule})")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
    /// Name of the typing rule whose premise failed, e.g. `⊸E`.
    pub rule: &'static str,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, span: Span, rule: &'static str) -> Self {
        TypeError { kind, span, rule }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TypeErrorKind {
    LinearityViolation { name: String, used: u32 },
    TypeMismatch { expected: LinearType, found: LinearType },
    UnknownName(String),
    DimMismatch { expected: String, found: String },
    PromotionError,
    NotAFunction(LinearType),
    Unsupported(String),
    MissingAnnotation(String),
    DiscardedLinear(LinearType),
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::LinearityViolation { name, used } => write!(
                f,
                "linear variable `{name}` must be used exactly once, but is used {used} time{}",
                if *used == 1 { "" } else { "s" }
            ),
            TypeErrorKind::TypeMismatch { expected, found } => {
                write!(f, "expected type {expected}, found {found}")
            }
            TypeErrorKind::UnknownName(name) => write!(f, "unknown name `{name}`"),
            TypeErrorKind::DimMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} qubits, found {found}")
            }
            TypeErrorKind::PromotionError => {
                f.write_str("cannot promote to a `!` type a term that consumes linear variables")
            }
            TypeErrorKind::NotAFunction(ty) => write!(f, "a term of type {ty} cannot be applied"),
            TypeErrorKind::Unsupported(what) => {
                write!(f, "{what} is not supported in the quantum fragment")
            }
            TypeErrorKind::MissingAnnotation(name) => {
                write!(f, "parameter `{name}` needs a type annotation")
            }
            TypeErrorKind::DiscardedLinear(ty) => {
                write!(f, "value of linear type {ty} is discarded")
            }
        }
    }
}

/// A checker failure inside a named library routine.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("in routine `{routine}`: {error}")]
pub struct LibraryError {
    pub routine: String,
    pub error: TypeError,
}
