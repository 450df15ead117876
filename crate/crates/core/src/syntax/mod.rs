//! Lexing and parsing of Qumin source text.
//!
//! The grammar is a PEG: every top-level program is a sequence of
//! expressions, arithmetic is always parenthesised (`(a + b)` is an infix
//! call of the function `+`), and lambdas may carry quantum-fragment type
//! annotations (`lambda(q : qubit, U : operator[1]){ ... }`).
//!
//! Extensions over the core grammar:
//! - `--qload name` loads a quantum library (type checked before use).
//! - `// ...` line comments are treated as whitespace.
//! - `let f(x, y){ ... }` is shorthand for `let f = lambda(x, y){ ... }`.
//! - `let u ⊗ v = e` destructures a tensor product inside a body.
//! - `f(a)(b)` applies the result of a call again.
//! - Composition arguments may be separated by commas.

mod ast;
mod parser;
mod printer;

pub use ast::{Binder, Node, NodeKind, Param, Span, TypeAnnotation};
pub use parser::{parse_expr, parse_program, parse_type_annotation, ParseError, ParseErrorKind};
pub use printer::print_program;

pub(crate) use printer::float_literal;

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let col = source[line_start..offset].chars().count() + 1;
    (line, col)
}
