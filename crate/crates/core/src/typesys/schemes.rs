//! Signature schemes of the quantum primitives. `n` and `m` range over
//! register widths and are fixed per use by unification.

use crate::syntax::Span;

use super::error::{TypeError, TypeErrorKind};
use super::types::{DimExpr, LinearType};

/// Names the checker knows without a definition. `·`/`apply` and
/// `⊗`/`tensor` are aliases.
pub const PRIMITIVES: [&str; 8] = [
    "·",
    "apply",
    "⊗",
    "tensor",
    "applyN",
    "measure",
    "tensorOp",
    "subsystems",
];

pub fn is_primitive(name: &str) -> bool {
    PRIMITIVES.contains(&name)
}

fn scheme_vars(name: &str) -> &'static [&'static str] {
    match name {
        "⊗" | "tensor" | "tensorOp" => &["n", "m"],
        _ => &["n"],
    }
}

/// Builds the scheme for `name` with each variable replaced by `dim(var)`.
pub(crate) fn scheme(name: &str, dim: &mut dyn FnMut(&str) -> DimExpr) -> Option<LinearType> {
    use LinearType as T;
    let q = |d: &DimExpr| T::QubitPow(d.clone());
    let op = |d: &DimExpr| T::lolli(q(d), q(d));
    let ty = match name {
        "·" | "apply" => {
            let n = dim("n");
            T::lolli(op(&n), T::lolli(q(&n), q(&n)))
        }
        "⊗" | "tensor" => {
            let (n, m) = (dim("n"), dim("m"));
            T::lolli(q(&n), T::lolli(q(&m), T::tensor(q(&n), q(&m))))
        }
        "applyN" => {
            let n = dim("n");
            T::lolli(op(&n), T::lolli(q(&n), T::lolli(T::Int, q(&n))))
        }
        "measure" => {
            let n = dim("n");
            T::lolli(q(&n), T::bang(q(&n)))
        }
        "tensorOp" => {
            let (n, m) = (dim("n"), dim("m"));
            let both = T::tensor(q(&n), q(&m));
            T::lolli(op(&n), T::lolli(op(&m), T::lolli(both.clone(), both)))
        }
        "subsystems" => {
            let n = dim("n");
            T::lolli(q(&n), T::lolli(T::List, T::bang(q(&n))))
        }
        _ => return None,
    };
    Some(ty)
}

/// Closes a primitive's scheme with literal widths, one per scheme variable
/// (`n`, then `m`). Single-variable schemes accept the width repeated, as
/// long as every copy agrees.
pub fn instantiate_scheme(prim: &str, dims: &[u32]) -> Result<LinearType, TypeError> {
    let err = |kind| TypeError::new(kind, Span::default(), "scheme");
    if !is_primitive(prim) {
        return Err(err(TypeErrorKind::UnknownName(prim.to_string())));
    }
    if let Some(&zero) = dims.iter().find(|&&d| d == 0) {
        return Err(err(TypeErrorKind::DimMismatch {
            expected: "at least 1".into(),
            found: zero.to_string(),
        }));
    }
    let vars = scheme_vars(prim);
    let values: Vec<u32> = if vars.len() == 1 {
        let Some(&n) = dims.first() else {
            return Err(err(TypeErrorKind::DimMismatch {
                expected: "1 width".into(),
                found: "none".into(),
            }));
        };
        if let Some(&other) = dims.iter().find(|&&d| d != n) {
            return Err(err(TypeErrorKind::DimMismatch {
                expected: n.to_string(),
                found: other.to_string(),
            }));
        }
        vec![n]
    } else {
        if dims.len() != vars.len() {
            return Err(err(TypeErrorKind::DimMismatch {
                expected: format!("{} widths", vars.len()),
                found: dims.len().to_string(),
            }));
        }
        dims.to_vec()
    };
    let mut lookup = |v: &str| {
        let i = vars.iter().position(|&x| x == v).unwrap_or(0);
        DimExpr::Lit(values[i])
    };
    Ok(scheme(prim, &mut lookup).expect("primitive has a scheme"))
}
