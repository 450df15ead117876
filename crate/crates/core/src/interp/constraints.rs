//! Runtime predicates derived from routine signatures. Every argument that
//! crosses from classical code into a checked routine is tested here first.

use crate::qcore::{norm, NORM_TOLERANCE};
use crate::typesys::{LinearType, RoutineSignature};

use super::error::ErrorKind;
use super::value::Value;

/// Tolerance on `U·U† = I` for operator arguments.
pub const UNITARY_TOLERANCE: f64 = 1e-6;

/// Checks `args`, which start at parameter index `offset`, against the
/// signature. Missing trailing arguments (partial application) are fine.
pub fn check_constraints(sig: &RoutineSignature, offset: usize, args: &[Value]) -> Result<(), ErrorKind> {
    for (i, arg) in args.iter().enumerate() {
        let position = offset + i;
        let Some((_, ty)) = sig.params.get(position) else {
            return Err(ErrorKind::Arity {
                callee: sig.name.clone(),
                expected: sig.params.len(),
                found: position + 1,
            });
        };
        if let Err(expected) = satisfies(ty, arg) {
            return Err(ErrorKind::Constraint {
                routine: sig.name.clone(),
                position: position + 1,
                expected,
                found: describe(arg),
            });
        }
    }
    Ok(())
}

fn strip_bangs(mut ty: &LinearType) -> &LinearType {
    while let LinearType::Bang(inner) = ty {
        ty = inner;
    }
    ty
}

/// `Err` carries a description of what was expected.
pub fn satisfies(ty: &LinearType, value: &Value) -> Result<(), String> {
    let ty = strip_bangs(ty);
    if let Some(n) = ty.qubit_count() {
        let len = 1usize << n;
        let expected = || {
            format!("a normalized state of {n} qubit{} (a list of {len} numbers with norm 1)", plural(n))
        };
        return match value.as_vector() {
            Some(v) if v.len() == len && (norm(&v) - 1.0).abs() <= NORM_TOLERANCE => Ok(()),
            _ => Err(expected()),
        };
    }
    match ty {
        LinearType::Int => match value {
            Value::Int(_) => Ok(()),
            _ => Err("an integer".into()),
        },
        LinearType::List => match value {
            Value::Seq(items) if items.iter().all(|x| matches!(x, Value::Int(_))) => Ok(()),
            _ => Err("a list of integers".into()),
        },
        LinearType::Lolli(a, b) => {
            let (a, b) = (strip_bangs(a), strip_bangs(b));
            match (a.qubit_count(), b.qubit_count()) {
                (Some(n), Some(m)) if n == m => {
                    let d = 1usize << n;
                    match value.as_matrix() {
                        Some(u) if u.rows() == d && u.cols() == d && u.is_unitary(UNITARY_TOLERANCE) => Ok(()),
                        _ => Err(format!("a {d}x{d} unitary matrix (operator[{n}])")),
                    }
                }
                (Some(n), Some(m)) => {
                    let (rows, cols) = (1usize << m, 1usize << n);
                    match value.as_matrix() {
                        Some(u) if u.rows() == rows && u.cols() == cols => Ok(()),
                        _ if value.is_callable() => Ok(()),
                        _ => Err(format!("a {rows}x{cols} matrix or a function")),
                    }
                }
                _ if value.is_callable() => Ok(()),
                _ => Err(format!("a function of type {ty}")),
            }
        }
        LinearType::Tensor(a, b) => match value {
            Value::Seq(items) if items.len() == 2 => {
                satisfies(a, &items[0]).and_then(|_| satisfies(b, &items[1])).map_err(|_| pair(ty))
            }
            _ => Err(pair(ty)),
        },
        LinearType::QubitPow(_) | LinearType::Bang(_) => Err(format!("a value of type {ty}")),
    }
}

fn pair(ty: &LinearType) -> String {
    format!("a two-element list matching {ty}")
}

fn plural(n: u32) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

/// Short human-readable shape of a value for diagnostics.
pub fn describe(value: &Value) -> String {
    if let Some(m) = value.as_matrix() {
        let unitary = if m.is_unitary(UNITARY_TOLERANCE) { "unitary" } else { "non-unitary" };
        return format!("a {}x{} {unitary} matrix", m.rows(), m.cols());
    }
    if let Some(v) = value.as_vector() {
        return format!("a list of {} numbers with norm {:.6}", v.len(), norm(&v));
    }
    match value {
        Value::Seq(items) => format!("a list of {} elements", items.len()),
        Value::Closure(_) | Value::Builtin(_) => "a function".into(),
        other => format!("the {} {other}", other.type_name()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn sig(params: Vec<LinearType>) -> RoutineSignature {
        RoutineSignature {
            name: "r".into(),
            params: params
                .into_iter()
                .enumerate()
                .map(|(i, t)| (format!("p{i}"), t))
                .collect(),
            result: LinearType::Int,
            tensor_splits: BTreeMap::new(),
        }
    }

    fn nums(xs: &[f64]) -> Value {
        Value::seq(xs.iter().map(|&x| Value::Float(x)).collect())
    }

    fn x_gate() -> Value {
        Value::seq(vec![nums(&[0.0, 1.0]), nums(&[1.0, 0.0])])
    }

    #[test]
    fn qubit_and_operator() {
        let s = sig(vec![LinearType::qubit(), LinearType::operator(1)]);
        assert!(check_constraints(&s, 0, &[nums(&[0.6, 0.8]), x_gate()]).is_ok());
        let err = check_constraints(&s, 0, &[nums(&[1.0, 1.0])]).unwrap_err();
        assert!(matches!(err, ErrorKind::Constraint { position: 1, .. }));
        let err = check_constraints(&s, 1, &[Value::seq(vec![nums(&[1.0, 1.0]), nums(&[1.0, 1.0])])]).unwrap_err();
        assert!(matches!(err, ErrorKind::Constraint { position: 2, .. }));
    }

    #[test]
    fn register_length_must_be_a_power_of_two() {
        let s = sig(vec![LinearType::tensor(LinearType::qubit(), LinearType::qubit())]);
        let three = nums(&[1.0, 0.0, 0.0]);
        assert!(check_constraints(&s, 0, &[three]).is_err());
        assert!(check_constraints(&s, 0, &[nums(&[0.0, 1.0, 0.0, 0.0])]).is_ok());
    }

    #[test]
    fn banged_operator_and_int() {
        let s = sig(vec![LinearType::bang(LinearType::operator(1)), LinearType::Int, LinearType::List]);
        let ints = Value::seq(vec![Value::Int(2), Value::Int(1)]);
        assert!(check_constraints(&s, 0, &[x_gate(), Value::Int(4), ints]).is_ok());
        assert!(check_constraints(&s, 1, &[Value::Float(4.0)]).is_err());
        assert!(check_constraints(&s, 2, &[nums(&[2.0])]).is_err());
    }

    #[test]
    fn too_many_arguments() {
        let s = sig(vec![LinearType::Int]);
        assert!(matches!(
            check_constraints(&s, 0, &[Value::Int(1), Value::Int(2)]),
            Err(ErrorKind::Arity { .. })
        ));
    }
}
