//! Primitive functions available to every program.

use std::rc::Rc;

use num_complex::Complex64;

use crate::qcore::{self, Matrix, Operand, QuantumState};
use crate::syntax::Span;

use super::env::Env;
use super::error::{ErrorKind, RuntimeError};
use super::value::{Builtin, BuiltinImpl, Value};
use super::Interpreter;

type R = Result<Value, RuntimeError>;

const TABLE: &[(&str, usize, BuiltinImpl)] = &[
    ("+", 2, add),
    ("-", 2, sub),
    ("*", 2, mul),
    ("/", 2, div),
    ("=", 2, equal),
    ("·", 2, apply),
    ("apply", 2, apply),
    ("⊗", 2, tensor),
    ("tensor", 2, tensor),
    ("tensorOp", 2, tensor_op),
    ("applyN", 3, apply_n),
    ("measure", 1, measure),
    ("subsystems", 2, subsystems),
    ("oracle", 1, oracle),
    ("generateMatrix", 2, generate_matrix),
    ("outer", 2, outer),
    ("car", 1, car),
    ("cdr", 1, cdr),
    ("append", 2, append),
    ("prepend", 2, prepend),
    ("length", 1, length),
    ("len", 1, length),
    ("exp", 1, exp),
    ("sqrt", 1, sqrt),
    ("fold", 2, fold),
    ("logTwo", 1, log_two),
    ("toInt", 1, to_int),
    ("print", 1, print),
];

/// Names bound by [`install`], in table order, followed by `pi`.
pub fn names() -> Vec<&'static str> {
    TABLE.iter().map(|(n, ..)| *n).chain(["pi"]).collect()
}

pub fn install(env: &Env) {
    for &(name, arity, func) in TABLE {
        let b = Builtin {
            name,
            arity,
            supplied: Vec::new(),
            func,
        };
        env.define(name, Value::Builtin(Rc::new(b)))
            .expect("builtin names are distinct");
    }
    env.define("pi", Value::Float(std::f64::consts::PI)).expect("distinct");
}

fn type_error(what: &str, got: &Value, span: Span) -> RuntimeError {
    RuntimeError::dynamic(format!("{what}, found {} `{got}`", got.type_name()), span)
}

fn quantum(e: qcore::QError, span: Span) -> RuntimeError {
    RuntimeError::at(ErrorKind::Quantum(e), span)
}

// ---------------------------------------------------------------- arithmetic

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
        }
    }
}

fn scalar(op: Op, a: &Value, b: &Value, span: Span) -> R {
    use Value::{Complex, Float, Int};
    if let (Int(x), Int(y)) = (a, b) {
        let r = match op {
            Op::Add => x.checked_add(*y),
            Op::Sub => x.checked_sub(*y),
            Op::Mul => x.checked_mul(*y),
            Op::Div => {
                if *y == 0 {
                    return Err(RuntimeError::at(ErrorKind::DivideByZero, span));
                }
                return Ok(Float(*x as f64 / *y as f64));
            }
        };
        return r.map(Int).ok_or_else(|| {
            RuntimeError::dynamic(format!("integer overflow in ({x} {} {y})", op.name()), span)
        });
    }
    if matches!(a, Complex(_)) || matches!(b, Complex(_)) {
        let (x, y) = (a.as_complex().unwrap(), b.as_complex().unwrap());
        if matches!(op, Op::Div) && y == Complex64::new(0.0, 0.0) {
            return Err(RuntimeError::at(ErrorKind::DivideByZero, span));
        }
        let r = match op {
            Op::Add => x + y,
            Op::Sub => x - y,
            Op::Mul => x * y,
            Op::Div => x / y,
        };
        return Ok(Value::from_complex(r));
    }
    let (x, y) = (a.as_complex().unwrap().re, b.as_complex().unwrap().re);
    Ok(Float(match op {
        Op::Add => x + y,
        Op::Sub => x - y,
        Op::Mul => x * y,
        Op::Div => {
            if y == 0.0 {
                return Err(RuntimeError::at(ErrorKind::DivideByZero, span));
            }
            x / y
        }
    }))
}

/// Numbers combine by the int → float → complex tower; lists combine
/// elementwise, and a number is broadcast over a list.
fn arith(op: Op, a: &Value, b: &Value, span: Span) -> R {
    match (a, b) {
        (x, y) if x.is_number() && y.is_number() => scalar(op, x, y, span),
        (Value::Seq(xs), Value::Seq(ys)) => {
            if xs.len() != ys.len() {
                return Err(RuntimeError::dynamic(
                    format!(
                        "`{}` on lists of different lengths ({} and {})",
                        op.name(),
                        xs.len(),
                        ys.len()
                    ),
                    span,
                ));
            }
            let items = xs
                .iter()
                .zip(ys.iter())
                .map(|(x, y)| arith(op, x, y, span))
                .collect::<Result<_, _>>()?;
            Ok(Value::seq(items))
        }
        (Value::Seq(xs), y) if y.is_number() => {
            let items = xs.iter().map(|x| arith(op, x, y, span)).collect::<Result<_, _>>()?;
            Ok(Value::seq(items))
        }
        (x, Value::Seq(ys)) if x.is_number() => {
            let items = ys.iter().map(|y| arith(op, x, y, span)).collect::<Result<_, _>>()?;
            Ok(Value::seq(items))
        }
        (x, y) => {
            let bad = if x.is_number() || matches!(x, Value::Seq(_)) { y } else { x };
            Err(type_error(&format!("`{}` needs numbers or lists of numbers", op.name()), bad, span))
        }
    }
}

fn add(_: &mut Interpreter, a: &[Value], s: Span) -> R {
    arith(Op::Add, &a[0], &a[1], s)
}

fn sub(_: &mut Interpreter, a: &[Value], s: Span) -> R {
    arith(Op::Sub, &a[0], &a[1], s)
}

fn mul(_: &mut Interpreter, a: &[Value], s: Span) -> R {
    arith(Op::Mul, &a[0], &a[1], s)
}

fn div(_: &mut Interpreter, a: &[Value], s: Span) -> R {
    arith(Op::Div, &a[0], &a[1], s)
}

fn equal(_: &mut Interpreter, a: &[Value], _: Span) -> R {
    Ok(Value::Bool(a[0].structural_eq(&a[1])))
}

// ------------------------------------------------------------------- quantum

fn all_ints(v: &Value) -> bool {
    match v {
        Value::Int(_) => true,
        Value::Seq(xs) => xs.iter().all(all_ints),
        _ => false,
    }
}

/// Results computed from integer-only inputs are integers; keep them so.
fn integral(v: Value) -> Value {
    match v {
        Value::Float(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Value::Int(x as i64),
        Value::Seq(xs) => Value::seq(xs.iter().cloned().map(integral).collect()),
        other => other,
    }
}

fn keep_ints(inputs: &[&Value], result: Value) -> Value {
    if inputs.iter().all(|v| all_ints(v)) {
        integral(result)
    } else {
        result
    }
}

fn operand(v: &Value, what: &str, span: Span) -> Result<Operand, RuntimeError> {
    v.as_operand()
        .ok_or_else(|| type_error(&format!("{what} must be a vector or a matrix"), v, span))
}

fn matrix(v: &Value, what: &str, span: Span) -> Result<Matrix, RuntimeError> {
    v.as_matrix()
        .ok_or_else(|| type_error(&format!("{what} must be a matrix"), v, span))
}

fn vector(v: &Value, what: &str, span: Span) -> Result<Vec<Complex64>, RuntimeError> {
    match v.as_vector() {
        Some(x) if !x.is_empty() => Ok(x),
        _ => Err(type_error(&format!("{what} must be a non-empty list of numbers"), v, span)),
    }
}

fn int(v: &Value, what: &str, span: Span) -> Result<i64, RuntimeError> {
    match v {
        Value::Int(i) => Ok(*i),
        other => Err(type_error(&format!("{what} must be an integer"), other, span)),
    }
}

fn state(v: &Value, span: Span) -> Result<QuantumState, RuntimeError> {
    QuantumState::new(vector(v, "a quantum state", span)?).map_err(|e| quantum(e, span))
}

/// `U · x`: matrix application (or composition, when `x` is a matrix).
/// A function in operator position is simply called.
pub(crate) fn apply(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    if a[0].is_callable() {
        return it.apply_value(&a[0], std::slice::from_ref(&a[1]), span);
    }
    let u = matrix(&a[0], "the operator of `apply`", span)?;
    let x = operand(&a[1], "the argument of `apply`", span)?;
    let r = qcore::apply_operand(&u, &x).map_err(|e| quantum(e, span))?;
    Ok(keep_ints(&[&a[0], &a[1]], Value::from_operand(&r)))
}

fn tensor(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let x = operand(&a[0], "the left side of `⊗`", span)?;
    let y = operand(&a[1], "the right side of `⊗`", span)?;
    let r = qcore::tensor_operands(&x, &y).map_err(|e| quantum(e, span))?;
    Ok(keep_ints(&[&a[0], &a[1]], Value::from_operand(&r)))
}

fn tensor_op(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let x = matrix(&a[0], "the first operator of `tensorOp`", span)?;
    let y = matrix(&a[1], "the second operator of `tensorOp`", span)?;
    let r = qcore::tensor_op(&x, &y).map_err(|e| quantum(e, span))?;
    Ok(keep_ints(&[&a[0], &a[1]], Value::from_matrix(&r)))
}

fn apply_n(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let times = int(&a[2], "the repetition count of `applyN`", span)?;
    if times < 0 {
        return Err(quantum(qcore::QError::NegativeCount(times), span));
    }
    if a[0].is_callable() {
        let mut v = a[1].clone();
        for _ in 0..times {
            v = it.apply_value(&a[0], &[v], span)?;
        }
        return Ok(v);
    }
    let u = matrix(&a[0], "the operator of `applyN`", span)?;
    let v = vector(&a[1], "the state of `applyN`", span)?;
    let r = qcore::apply_n(&u, &v, times).map_err(|e| quantum(e, span))?;
    Ok(keep_ints(&[&a[0], &a[1]], Value::from_vector(&r)))
}

fn collapsed(s: &QuantumState, outcome: usize) -> Value {
    Value::basis_vector(s.dim(), outcome)
}

fn measure(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let s = state(&a[0], span)?;
    let (_, report) = qcore::measure(&s, it.rng());
    let outcome = report.outcome();
    it.emit_report(report, span)?;
    Ok(collapsed(&s, outcome))
}

fn subsystems(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let s = state(&a[0], span)?;
    let config = match &a[1] {
        Value::Seq(items) => items
            .iter()
            .map(|x| match x {
                Value::Int(c) if *c >= 0 => Ok(*c as usize),
                other => Err(type_error("subsystem widths must be non-negative integers", other, span)),
            })
            .collect::<Result<Vec<_>, _>>()?,
        other => return Err(type_error("the configuration of `subsystems` must be a list", other, span)),
    };
    let (_, report) = qcore::subsystems(&s, &config, it.rng()).map_err(|e| quantum(e, span))?;
    let outcome = report.outcome();
    it.emit_report(report, span)?;
    Ok(collapsed(&s, outcome))
}

fn oracle(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let m = matrix(&a[0], "the argument of `oracle`", span)?;
    let u = qcore::oracle(&m).map_err(|e| quantum(e, span))?;
    Ok(Value::from_01_matrix(&u))
}

/// Column `i` of the result is `f(eᵢ)`; basis vectors are passed as lists
/// of integers so that classical code can compare them with `=`.
fn generate_matrix(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let dim = int(&a[1], "the dimension of `generateMatrix`", span)?;
    if dim < 1 {
        return Err(RuntimeError::dynamic(
            format!("`generateMatrix` needs a dimension of at least 1, found {dim}"),
            span,
        ));
    }
    let dim = dim as usize;
    let f = a[0].clone();
    if !f.is_callable() {
        return Err(type_error("the first argument of `generateMatrix` must be a function", &f, span));
    }
    let mut ints = true;
    let m = qcore::generate_matrix(dim, |i, _| -> Result<Vec<Complex64>, RuntimeError> {
        let out = it.apply_value(&f, &[Value::basis_vector(dim, i)], span)?;
        ints &= all_ints(&out);
        vector(&out, "each result of the generated function", span)
    })
    .map_err(|e| match e.kind {
        ErrorKind::Quantum(q) if e.span.is_none() => quantum(q, span),
        _ => e,
    })?;
    let m = Value::from_matrix(&m);
    Ok(if ints { integral(m) } else { m })
}

fn outer(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let u = vector(&a[0], "the left side of `outer`", span)?;
    let v = vector(&a[1], "the right side of `outer`", span)?;
    let m = qcore::outer(&u, &v).map_err(|e| quantum(e, span))?;
    Ok(keep_ints(&[&a[0], &a[1]], Value::from_matrix(&m)))
}

// ----------------------------------------------------------------- sequences

fn items<'a>(v: &'a Value, what: &str, span: Span) -> Result<&'a [Value], RuntimeError> {
    match v {
        Value::Seq(xs) => Ok(xs),
        other => Err(type_error(&format!("{what} must be a list"), other, span)),
    }
}

fn car(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    items(&a[0], "the argument of `car`", span)?
        .first()
        .cloned()
        .ok_or_else(|| RuntimeError::dynamic("`car` of an empty list", span))
}

fn cdr(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let xs = items(&a[0], "the argument of `cdr`", span)?;
    if xs.is_empty() {
        return Err(RuntimeError::dynamic("`cdr` of an empty list", span));
    }
    Ok(Value::seq(xs[1..].to_vec()))
}

fn as_list(v: &Value) -> Vec<Value> {
    match v {
        Value::Seq(xs) => xs.to_vec(),
        other => vec![other.clone()],
    }
}

/// `append(a, b)`: the elements of `a` followed by those of `b`; a
/// non-list stands for a one-element list.
fn append(_: &mut Interpreter, a: &[Value], _: Span) -> R {
    let mut out = as_list(&a[0]);
    out.extend(as_list(&a[1]));
    Ok(Value::seq(out))
}

/// `prepend(x, xs)`: the elements of `xs` followed by `x`. With this order
/// `genZero` builds `[1 0 … 0]`, the vector |0⟩.
fn prepend(_: &mut Interpreter, a: &[Value], _: Span) -> R {
    let mut out = as_list(&a[1]);
    out.extend(as_list(&a[0]));
    Ok(Value::seq(out))
}

fn length(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    match &a[0] {
        Value::Seq(xs) => Ok(Value::Int(xs.len() as i64)),
        Value::Str(s) => Ok(Value::Int(s.chars().count() as i64)),
        other => Err(type_error("`length` needs a list or a string", other, span)),
    }
}

// ---------------------------------------------------------------------- math

fn number(v: &Value, what: &str, span: Span) -> Result<Complex64, RuntimeError> {
    v.as_complex()
        .ok_or_else(|| type_error(&format!("{what} must be a number"), v, span))
}

fn exp(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let x = number(&a[0], "the argument of `exp`", span)?;
    Ok(Value::from_complex(x.exp()))
}

fn sqrt(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    let x = number(&a[0], "the argument of `sqrt`", span)?;
    if x.im == 0.0 && x.re >= 0.0 {
        return Ok(Value::Float(x.re.sqrt()));
    }
    Ok(Value::from_complex(x.sqrt()))
}

/// Left fold without a seed: `fold(f, [a b c]) = f(f(a, b), c)`.
fn fold(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let xs = items(&a[1], "the second argument of `fold`", span)?;
    let Some((first, rest)) = xs.split_first() else {
        return Err(RuntimeError::dynamic("`fold` of an empty list", span));
    };
    let mut acc = first.clone();
    for x in rest {
        acc = it.apply_value(&a[0], &[acc, x.clone()], span)?;
    }
    Ok(acc)
}

fn log_two(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    match &a[0] {
        Value::Int(n) if *n > 0 && (*n as u64).is_power_of_two() => Ok(Value::Int(n.trailing_zeros() as i64)),
        v => {
            let x = number(v, "the argument of `logTwo`", span)?;
            if x.im != 0.0 || x.re <= 0.0 {
                return Err(type_error("`logTwo` needs a positive real number", v, span));
            }
            Ok(Value::Float(x.re.log2()))
        }
    }
}

/// Truncates toward zero.
fn to_int(_: &mut Interpreter, a: &[Value], span: Span) -> R {
    match &a[0] {
        Value::Int(i) => Ok(Value::Int(*i)),
        Value::Float(x) if x.is_finite() && x.abs() < 9.2e18 => Ok(Value::Int(x.trunc() as i64)),
        other => Err(type_error("`toInt` needs a finite real number", other, span)),
    }
}

fn print(it: &mut Interpreter, a: &[Value], span: Span) -> R {
    let text = match &a[0] {
        Value::Str(s) => s.to_string(),
        other => other.to_string(),
    };
    it.write_line(&text, span)?;
    Ok(a[0].clone())
}
