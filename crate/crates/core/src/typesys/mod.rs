//! Linear type checking for the quantum fragment.
//!
//! Routines are lambdas whose parameters all carry annotations. Checking is
//! bidirectional: parameters are given, applications synthesise. Linear
//! variables (qubits and un-banged operators) must be used exactly once;
//! `!`-typed, `int` and `list` variables are unrestricted. Register widths in
//! the primitive schemes are solved by unification.

mod checker;
mod context;
mod error;
mod schemes;
mod types;

pub use checker::{check_quantum_library, check_routine, check_term, Globals, RoutineSignature};
pub use context::{Binding, Mark, Mode, TypingContext, UnconsumedBinding};
pub use error::{LibraryError, TypeError, TypeErrorKind};
pub use schemes::{instantiate_scheme, is_primitive, PRIMITIVES};
pub use types::{desugar_annotation, DimExpr, LinearType};
