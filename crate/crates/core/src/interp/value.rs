use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use num_complex::Complex64;

use crate::qcore::{Matrix, Operand};
use crate::syntax::{float_literal, Node, Span};
use crate::typesys::RoutineSignature;

use super::env::Env;
use super::error::RuntimeError;
use super::Interpreter;

/// Tolerance used by `=` when comparing non-integer numbers.
pub const FLOAT_EQ_TOLERANCE: f64 = 1e-12;

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Complex(Complex64),
    Bool(bool),
    Str(Rc<str>),
    /// Lists; vectors are lists of numbers and matrices lists of rows.
    Seq(Rc<Vec<Value>>),
    Closure(Rc<Closure>),
    Builtin(Rc<Builtin>),
}

pub struct Closure {
    pub params: Rc<[String]>,
    /// Arguments already supplied by partial application.
    pub supplied: Vec<Value>,
    pub body: Rc<[Node]>,
    pub env: Env,
    /// Present iff the closure is a type-checked quantum routine.
    pub signature: Option<Rc<RoutineSignature>>,
    /// Split points for `let u ⊗ v` forms in the body, inherited by lambdas
    /// created inside a routine.
    pub splits: Option<Rc<BTreeMap<usize, u32>>>,
    /// Index of the source text the body was parsed from.
    pub source: usize,
}

pub type BuiltinImpl = fn(&mut Interpreter, &[Value], Span) -> Result<Value, RuntimeError>;

pub struct Builtin {
    pub name: &'static str,
    pub arity: usize,
    pub supplied: Vec<Value>,
    pub func: BuiltinImpl,
}

impl Value {
    pub fn seq(items: Vec<Value>) -> Value {
        Value::Seq(Rc::new(items))
    }

    pub fn empty() -> Value {
        Value::seq(Vec::new())
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Complex(_) => "complex number",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Seq(_) => "list",
            Value::Closure(_) | Value::Builtin(_) => "function",
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Value::Int(i) => Some(Complex64::new(*i as f64, 0.0)),
            Value::Float(f) => Some(Complex64::new(*f, 0.0)),
            Value::Complex(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_number(&self) -> bool {
        matches!(self, Value::Int(_) | Value::Float(_) | Value::Complex(_))
    }

    /// A list of numbers.
    pub fn as_vector(&self) -> Option<Vec<Complex64>> {
        match self {
            Value::Seq(items) => items.iter().map(Value::as_complex).collect(),
            _ => None,
        }
    }

    /// A non-empty rectangular list of lists of numbers.
    pub fn as_matrix(&self) -> Option<Matrix> {
        let Value::Seq(rows) = self else { return None };
        let rows: Option<Vec<Vec<Complex64>>> = rows
            .iter()
            .map(|r| match r {
                Value::Seq(_) => r.as_vector(),
                _ => None,
            })
            .collect();
        Matrix::from_rows(rows?).ok()
    }

    pub fn as_operand(&self) -> Option<Operand> {
        if let Some(m) = self.as_matrix() {
            return Some(Operand::Matrix(m));
        }
        match self.as_vector() {
            Some(v) if !v.is_empty() => Some(Operand::Vector(v)),
            _ => None,
        }
    }

    pub fn from_complex(c: Complex64) -> Value {
        if c.im == 0.0 {
            Value::Float(c.re)
        } else {
            Value::Complex(c)
        }
    }

    pub fn from_vector(v: &[Complex64]) -> Value {
        Value::seq(v.iter().copied().map(Value::from_complex).collect())
    }

    pub fn from_matrix(m: &Matrix) -> Value {
        Value::seq((0..m.rows()).map(|r| Value::from_vector(m.row(r))).collect())
    }

    pub fn from_operand(o: &Operand) -> Value {
        match o {
            Operand::Vector(v) => Value::from_vector(v),
            Operand::Matrix(m) => Value::from_matrix(m),
        }
    }

    /// A matrix known to hold only 0 and 1, kept as integers.
    pub fn from_01_matrix(m: &Matrix) -> Value {
        Value::seq(
            (0..m.rows())
                .map(|r| {
                    Value::seq(
                        m.row(r)
                            .iter()
                            .map(|c| Value::Int(if c.re == 1.0 { 1 } else { 0 }))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn basis_vector(dim: usize, index: usize) -> Value {
        Value::seq((0..dim).map(|i| Value::Int(i64::from(i == index))).collect())
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Value::Closure(_) | Value::Builtin(_))
    }

    /// Structural equality; numbers compare across the numeric tower, with
    /// non-integers equal within [`FLOAT_EQ_TOLERANCE`]. Functions are never equal.
    pub fn structural_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Seq(a), Value::Seq(b)) => {
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.structural_eq(y))
            }
            (a, b) => match (a.as_complex(), b.as_complex()) {
                (Some(x), Some(y)) => (x - y).norm() <= FLOAT_EQ_TOLERANCE,
                _ => false,
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&float_literal(*x)),
            Value::Complex(c) => {
                let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", c.re, sign, c.im.abs())
            }
            Value::Bool(b) => f.write_str(if *b { "#t" } else { "#f" }),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::Seq(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
            Value::Closure(c) => match &c.signature {
                Some(sig) => write!(f, "<routine {}>", sig.name),
                None => {
                    let rest = &c.params[c.supplied.len()..];
                    write!(f, "<lambda({})>", rest.join(", "))
                }
            },
            Value::Builtin(b) => write!(f, "<builtin {}>", b.name),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
