use std::fmt;

use crate::qcore::QError;
use crate::syntax::{ParseError, Span};
use crate::typesys::LibraryError;

#[derive(Clone, Debug, PartialEq)]
pub enum ErrorKind {
    Parse(Box<ParseError>),
    Type(Box<LibraryError>),
    UnboundName(String),
    Arity {
        callee: String,
        expected: usize,
        found: usize,
    },
    /// A value of the wrong kind reached an operation, e.g. `+` on a string.
    Dynamic(String),
    DivideByZero,
    /// An argument crossing into a quantum routine failed its predicate.
    Constraint {
        routine: String,
        /// 1-based argument position.
        position: usize,
        expected: String,
        found: String,
    },
    Quantum(QError),
    RecursionLimit(usize),
    ModuleNotFound { name: String, searched: Vec<String> },
    CyclicLoad(Vec<String>),
    Io { path: String, message: String },
    Rebind(String),
}

/// Failure while loading or evaluating a program. `source` indexes the
/// interpreter's table of loaded texts so the span can be rendered.
#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeError {
    pub kind: ErrorKind,
    pub span: Option<Span>,
    pub source: Option<usize>,
}

impl RuntimeError {
    pub fn new(kind: ErrorKind) -> Self {
        RuntimeError {
            kind,
            span: None,
            source: None,
        }
    }

    pub fn at(kind: ErrorKind, span: Span) -> Self {
        RuntimeError {
            kind,
            span: Some(span),
            source: None,
        }
    }

    pub fn dynamic(message: impl Into<String>, span: Span) -> Self {
        RuntimeError::at(ErrorKind::Dynamic(message.into()), span)
    }

    /// Attaches a location unless one is already present.
    pub fn located(mut self, span: Span, source: usize) -> Self {
        if self.span.is_none() {
            self.span = Some(span);
        }
        if self.source.is_none() {
            self.source = Some(source);
        }
        self
    }

    pub fn in_source(mut self, source: usize) -> Self {
        if self.source.is_none() {
            self.source = Some(source);
        }
        self
    }

    /// Process exit status: 1 parse, 2 type, 3 constraint, 4 runtime, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Parse(_) => 1,
            ErrorKind::Type(_) => 2,
            ErrorKind::Constraint { .. } => 3,
            ErrorKind::Io { .. } | ErrorKind::ModuleNotFound { .. } => 5,
            _ => 4,
        }
    }
}

impl From<QError> for RuntimeError {
    fn from(e: QError) -> Self {
        RuntimeError::new(ErrorKind::Quantum(e))
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::Parse(e) => write!(f, "{e}"),
            ErrorKind::Type(e) => write!(f, "type error {e}"),
            ErrorKind::UnboundName(n) => write!(f, "unbound name `{n}`"),
            ErrorKind::Arity {
                callee,
                expected,
                found,
            } => write!(
                f,
                "`{callee}` takes {expected} argument{}, but {found} were supplied",
                if *expected == 1 { "" } else { "s" }
            ),
            ErrorKind::Dynamic(m) => f.write_str(m),
            ErrorKind::DivideByZero => f.write_str("division by zero"),
            ErrorKind::Constraint {
                routine,
                position,
                expected,
                found,
            } => write!(
                f,
                "argument {position} of routine `{routine}` violates its signature: expected {expected}, found {found}"
            ),
            ErrorKind::Quantum(e) => write!(f, "{e}"),
            ErrorKind::RecursionLimit(n) => write!(f, "recursion deeper than {n} calls"),
            ErrorKind::ModuleNotFound { name, searched } => {
                write!(f, "module `{name}` not found")?;
                if !searched.is_empty() {
                    write!(f, " (searched {})", searched.join(", "))?;
                }
                Ok(())
            }
            ErrorKind::CyclicLoad(chain) => write!(f, "cyclic load: {}", chain.join(" -> ")),
            ErrorKind::Io { path, message } => write!(f, "{path}: {message}"),
            ErrorKind::Rebind(n) => write!(f, "`{n}` is already bound in this scope"),
        }
    }
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

impl std::error::Error for RuntimeError {}
