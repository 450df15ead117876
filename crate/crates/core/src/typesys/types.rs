use std::fmt;

use crate::syntax::TypeAnnotation;

/// Number of qubits in a register type. Scheme variables stand for any
/// positive width and are fixed by unification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DimExpr {
    Lit(u32),
    Var(String),
    Sum(Vec<DimExpr>),
}

impl DimExpr {
    pub fn var(name: &str) -> Self {
        DimExpr::Var(name.to_string())
    }

    pub fn as_lit(&self) -> Option<u32> {
        match self.simplified() {
            DimExpr::Lit(n) => Some(n),
            _ => None,
        }
    }

    /// Flattens nested sums and folds literal terms together.
    pub fn simplified(&self) -> DimExpr {
        let mut lit = 0u32;
        let mut vars = Vec::new();
        fn collect(d: &DimExpr, lit: &mut u32, vars: &mut Vec<DimExpr>) {
            match d {
                DimExpr::Lit(n) => *lit += n,
                DimExpr::Var(_) => vars.push(d.clone()),
                DimExpr::Sum(parts) => parts.iter().for_each(|p| collect(p, lit, vars)),
            }
        }
        collect(self, &mut lit, &mut vars);
        if vars.is_empty() {
            return DimExpr::Lit(lit);
        }
        if lit > 0 {
            vars.push(DimExpr::Lit(lit));
        }
        if vars.len() == 1 {
            vars.pop().unwrap()
        } else {
            DimExpr::Sum(vars)
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        match self {
            DimExpr::Lit(_) => vec![],
            DimExpr::Var(v) => vec![v.as_str()],
            DimExpr::Sum(parts) => parts.iter().flat_map(DimExpr::vars).collect(),
        }
    }
}

impl fmt::Display for DimExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimExpr::Lit(n) => write!(f, "{n}"),
            DimExpr::Var(v) => f.write_str(v.split('#').next().unwrap_or(v)),
            DimExpr::Sum(parts) => {
                let parts: Vec<_> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", parts.join("+"))
            }
        }
    }
}

/// Types of the linearly typed quantum fragment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LinearType {
    /// `qubit^{⊗n}`; a single qubit is `QubitPow(Lit(1))`.
    QubitPow(DimExpr),
    Int,
    List,
    Tensor(Box<LinearType>, Box<LinearType>),
    Lolli(Box<LinearType>, Box<LinearType>),
    Bang(Box<LinearType>),
}

impl LinearType {
    pub fn qubit() -> Self {
        LinearType::QubitPow(DimExpr::Lit(1))
    }

    pub fn qubits(n: u32) -> Self {
        LinearType::QubitPow(DimExpr::Lit(n))
    }

    pub fn qubits_var(name: &str) -> Self {
        LinearType::QubitPow(DimExpr::var(name))
    }

    pub fn lolli(a: LinearType, b: LinearType) -> Self {
        LinearType::Lolli(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: LinearType, b: LinearType) -> Self {
        LinearType::Tensor(Box::new(a), Box::new(b))
    }

    pub fn bang(a: LinearType) -> Self {
        LinearType::Bang(Box::new(a))
    }

    /// `operator[n]`: `qubit^{⊗n} ⊸ qubit^{⊗n}`.
    pub fn operator(n: u32) -> Self {
        LinearType::lolli(LinearType::qubits(n), LinearType::qubits(n))
    }

    /// Values of these types may be used any number of times, including zero.
    pub fn is_unrestricted(&self) -> bool {
        matches!(self, LinearType::Bang(_) | LinearType::Int | LinearType::List)
    }

    /// Total width if the type is made only of qubit registers.
    pub fn qubit_dim(&self) -> Option<DimExpr> {
        match self {
            LinearType::QubitPow(d) => Some(d.simplified()),
            LinearType::Tensor(a, b) => {
                Some(DimExpr::Sum(vec![a.qubit_dim()?, b.qubit_dim()?]).simplified())
            }
            _ => None,
        }
    }

    pub fn qubit_count(&self) -> Option<u32> {
        self.qubit_dim()?.as_lit()
    }

    /// Removes one level of `!`, if present.
    pub fn derelict(&self) -> &LinearType {
        match self {
            LinearType::Bang(inner) => inner,
            other => other,
        }
    }

    /// Canonical form used for comparison: all-qubit tensors collapse to a
    /// single register and `!!A` collapses to `!A`.
    pub fn normalized(&self) -> LinearType {
        match self {
            LinearType::QubitPow(d) => LinearType::QubitPow(d.simplified()),
            LinearType::Tensor(a, b) => match self.qubit_dim() {
                Some(d) => LinearType::QubitPow(d),
                None => LinearType::tensor(a.normalized(), b.normalized()),
            },
            LinearType::Lolli(a, b) => LinearType::lolli(a.normalized(), b.normalized()),
            LinearType::Bang(inner) => match inner.normalized() {
                b @ LinearType::Bang(_) => b,
                other => LinearType::bang(other),
            },
            other => other.clone(),
        }
    }

    pub fn equivalent(&self, other: &LinearType) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn has_vars(&self) -> bool {
        match self {
            LinearType::QubitPow(d) => !d.vars().is_empty(),
            LinearType::Int | LinearType::List => false,
            LinearType::Tensor(a, b) | LinearType::Lolli(a, b) => a.has_vars() || b.has_vars(),
            LinearType::Bang(a) => a.has_vars(),
        }
    }

    pub fn map_dims(&self, f: &dyn Fn(&DimExpr) -> DimExpr) -> LinearType {
        match self {
            LinearType::QubitPow(d) => LinearType::QubitPow(f(d).simplified()),
            LinearType::Int => LinearType::Int,
            LinearType::List => LinearType::List,
            LinearType::Tensor(a, b) => LinearType::tensor(a.map_dims(f), b.map_dims(f)),
            LinearType::Lolli(a, b) => LinearType::lolli(a.map_dims(f), b.map_dims(f)),
            LinearType::Bang(a) => LinearType::bang(a.map_dims(f)),
        }
    }
}

impl fmt::Display for LinearType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(t: &LinearType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                LinearType::Tensor(..) | LinearType::Lolli(..) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            }
        }
        match self {
            LinearType::QubitPow(DimExpr::Lit(1)) => f.write_str("qubit"),
            LinearType::QubitPow(d @ DimExpr::Sum(_)) => write!(f, "qubit^({d})"),
            LinearType::QubitPow(d) => write!(f, "qubit^{d}"),
            LinearType::Int => f.write_str("int"),
            LinearType::List => f.write_str("list"),
            LinearType::Tensor(a, b) => {
                atom(a, f)?;
                f.write_str(" ⊗ ")?;
                atom(b, f)
            }
            LinearType::Lolli(a, b) => {
                atom(a, f)?;
                write!(f, " ⊸ {b}")
            }
            LinearType::Bang(a) => {
                f.write_str("!")?;
                atom(a, f)
            }
        }
    }
}

/// Maps surface annotations onto checker types.
pub fn desugar_annotation(ann: &TypeAnnotation) -> LinearType {
    match ann {
        TypeAnnotation::Qubit => LinearType::qubit(),
        TypeAnnotation::Int => LinearType::Int,
        TypeAnnotation::List => LinearType::List,
        TypeAnnotation::Tensor(a, b) => {
            LinearType::tensor(desugar_annotation(a), desugar_annotation(b))
        }
        TypeAnnotation::Fn(a, b) => LinearType::lolli(desugar_annotation(a), desugar_annotation(b)),
        TypeAnnotation::Operator(n) => LinearType::operator(*n),
        TypeAnnotation::Bang(a) => LinearType::bang(desugar_annotation(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type_annotation;

    fn desugar(src: &str) -> LinearType {
        desugar_annotation(&parse_type_annotation(src).unwrap())
    }

    #[test]
    fn operator_shorthand() {
        assert_eq!(
            desugar("operator[2]"),
            LinearType::lolli(LinearType::qubits(2), LinearType::qubits(2))
        );
    }

    #[test]
    fn base_and_structural_cases() {
        assert_eq!(desugar("qubit"), LinearType::qubits(1));
        assert_eq!(
            desugar("!{qubit * qubit}"),
            LinearType::bang(LinearType::tensor(LinearType::qubit(), LinearType::qubit()))
        );
        assert_eq!(
            desugar("qubit > int"),
            LinearType::lolli(LinearType::qubit(), LinearType::Int)
        );
    }

    #[test]
    fn flattened_tensors_are_equivalent_to_registers() {
        let t = desugar("qubit * qubit * qubit");
        assert!(t.equivalent(&LinearType::qubits(3)));
        assert!(LinearType::tensor(LinearType::qubits(2), LinearType::qubit())
            .equivalent(&LinearType::tensor(LinearType::qubit(), LinearType::qubits(2))));
        assert!(!desugar("qubit * int").equivalent(&desugar("int * qubit")));
    }

    #[test]
    fn double_bang_collapses() {
        let once = LinearType::bang(LinearType::qubit());
        let twice = LinearType::bang(once.clone());
        assert!(once.equivalent(&twice));
        assert_ne!(once, twice);
    }

    #[test]
    fn desugaring_preserves_qubit_counts() {
        for (src, n) in [
            ("qubit", 1),
            ("qubit * qubit", 2),
            ("qubit * (qubit * qubit)", 3),
        ] {
            let ann = parse_type_annotation(src).unwrap();
            assert_eq!(ann.qubit_count(), Some(n));
            assert_eq!(desugar_annotation(&ann).qubit_count(), Some(n));
        }
    }

    #[test]
    fn dim_simplification() {
        let d = DimExpr::Sum(vec![
            DimExpr::Lit(1),
            DimExpr::Sum(vec![DimExpr::var("n"), DimExpr::Lit(2)]),
        ]);
        assert_eq!(
            d.simplified(),
            DimExpr::Sum(vec![DimExpr::var("n"), DimExpr::Lit(3)])
        );
        assert_eq!(
            DimExpr::Sum(vec![DimExpr::Lit(1), DimExpr::Lit(2)]).as_lit(),
            Some(3)
        );
    }

    #[test]
    fn display() {
        assert_eq!(desugar("!{operator[2]}").to_string(), "!(qubit^2 ⊸ qubit^2)");
        assert_eq!(desugar("qubit * qubit").to_string(), "qubit ⊗ qubit");
    }
}
