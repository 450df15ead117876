use std::fmt;

/// Half-open byte range `[start, end)` into the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// A parsed expression together with its location in the source.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// `--load name` or `--qload name`.
    Load { quantum: bool, name: String },
    /// `let name = expr`.
    Assignment { name: String, expr: Box<Node> },
    /// `let u ⊗ v = expr`; the rest of the enclosing body is the scope of `u` and `v`.
    TensorLet {
        left: Binder,
        right: Binder,
        expr: Box<Node>,
    },
    Lambda {
        params: Vec<Param>,
        body: Vec<Node>,
        immediate_args: Option<Vec<Node>>,
    },
    Call { callee: Box<Node>, args: Vec<Node> },
    InfixCall {
        lhs: Box<Node>,
        op: String,
        rhs: Box<Node>,
    },
    PrefixCall { op: String, arg: Box<Node> },
    /// `f . g . h(args)`, applied right to left.
    Composition { names: Vec<String>, args: Vec<Node> },
    IfElse {
        cond: Box<Node>,
        then_body: Vec<Node>,
        else_body: Vec<Node>,
    },
    ListLit(Vec<Node>),
    IntLit(i64),
    FloatLit(f64),
    ComplexLit { re: f64, im: f64 },
    BoolLit(bool),
    StringLit(String),
    Name(String),
}

/// A lambda parameter with its optional quantum-fragment annotation.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: String,
    pub ann: Option<TypeAnnotation>,
    pub span: Span,
}

/// One side of a tensor destructuring `let`.
pub type Binder = Param;

/// Surface syntax of a type in a routine signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeAnnotation {
    Qubit,
    Int,
    List,
    Tensor(Box<TypeAnnotation>, Box<TypeAnnotation>),
    Fn(Box<TypeAnnotation>, Box<TypeAnnotation>),
    Operator(u32),
    Bang(Box<TypeAnnotation>),
}

impl Node {
    pub fn new(kind: NodeKind, span: Span) -> Self {
        Node { kind, span }
    }

    /// Copy of the tree with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> Node {
        fn all(nodes: &[Node]) -> Vec<Node> {
            nodes.iter().map(Node::without_spans).collect()
        }
        fn param(p: &Param) -> Param {
            Param {
                name: p.name.clone(),
                ann: p.ann.clone(),
                span: Span::default(),
            }
        }
        let kind = match &self.kind {
            NodeKind::Assignment { name, expr } => NodeKind::Assignment {
                name: name.clone(),
                expr: Box::new(expr.without_spans()),
            },
            NodeKind::TensorLet { left, right, expr } => NodeKind::TensorLet {
                left: param(left),
                right: param(right),
                expr: Box::new(expr.without_spans()),
            },
            NodeKind::Lambda {
                params,
                body,
                immediate_args,
            } => NodeKind::Lambda {
                params: params.iter().map(param).collect(),
                body: all(body),
                immediate_args: immediate_args.as_deref().map(all),
            },
            NodeKind::Call { callee, args } => NodeKind::Call {
                callee: Box::new(callee.without_spans()),
                args: all(args),
            },
            NodeKind::InfixCall { lhs, op, rhs } => NodeKind::InfixCall {
                lhs: Box::new(lhs.without_spans()),
                op: op.clone(),
                rhs: Box::new(rhs.without_spans()),
            },
            NodeKind::PrefixCall { op, arg } => NodeKind::PrefixCall {
                op: op.clone(),
                arg: Box::new(arg.without_spans()),
            },
            NodeKind::Composition { names, args } => NodeKind::Composition {
                names: names.clone(),
                args: all(args),
            },
            NodeKind::IfElse {
                cond,
                then_body,
                else_body,
            } => NodeKind::IfElse {
                cond: Box::new(cond.without_spans()),
                then_body: all(then_body),
                else_body: all(else_body),
            },
            NodeKind::ListLit(elems) => NodeKind::ListLit(all(elems)),
            other => other.clone(),
        };
        Node::new(kind, Span::default())
    }

    /// Calls `f` on this node and every descendant, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Node)) {
        f(self);
        let children: Vec<&Node> = match &self.kind {
            NodeKind::Assignment { expr, .. } | NodeKind::TensorLet { expr, .. } => vec![expr],
            NodeKind::Lambda {
                body,
                immediate_args,
                ..
            } => body
                .iter()
                .chain(immediate_args.iter().flatten())
                .collect(),
            NodeKind::Call { callee, args } => std::iter::once(&**callee).chain(args).collect(),
            NodeKind::InfixCall { lhs, rhs, .. } => vec![lhs, rhs],
            NodeKind::PrefixCall { arg, .. } => vec![arg],
            NodeKind::Composition { args, .. } => args.iter().collect(),
            NodeKind::IfElse {
                cond,
                then_body,
                else_body,
            } => std::iter::once(&**cond)
                .chain(then_body)
                .chain(else_body)
                .collect(),
            NodeKind::ListLit(elems) => elems.iter().collect(),
            _ => vec![],
        };
        for child in children {
            child.walk(f);
        }
    }
}

impl TypeAnnotation {
    /// Number of qubits in a purely qubit-valued annotation (`qubit * qubit` is 2).
    pub fn qubit_count(&self) -> Option<u32> {
        match self {
            TypeAnnotation::Qubit => Some(1),
            TypeAnnotation::Tensor(a, b) => Some(a.qubit_count()? + b.qubit_count()?),
            _ => None,
        }
    }
}

impl fmt::Display for TypeAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(t: &TypeAnnotation, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                TypeAnnotation::Tensor(..) | TypeAnnotation::Fn(..) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            }
        }
        match self {
            TypeAnnotation::Qubit => f.write_str("qubit"),
            TypeAnnotation::Int => f.write_str("int"),
            TypeAnnotation::List => f.write_str("list"),
            TypeAnnotation::Operator(n) => write!(f, "operator[{n}]"),
            TypeAnnotation::Bang(t) => write!(f, "!{{{t}}}"),
            TypeAnnotation::Tensor(a, b) => {
                // `*` is left-associative, so only a right-nested tensor needs parentheses.
                match **a {
                    TypeAnnotation::Fn(..) => atom(a, f)?,
                    _ => write!(f, "{a}")?,
                }
                f.write_str(" * ")?;
                atom(b, f)
            }
            TypeAnnotation::Fn(a, b) => {
                match **a {
                    TypeAnnotation::Fn(..) => atom(a, f)?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " > {b}")
            }
        }
    }
}
