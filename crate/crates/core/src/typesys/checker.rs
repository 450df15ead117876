use std::collections::{BTreeMap, HashMap};

use crate::syntax::{Node, NodeKind, Param, Span};

use super::context::{TypingContext, UnconsumedBinding};
use super::error::{LibraryError, TypeError, TypeErrorKind};
use super::schemes::scheme;
use super::types::{desugar_annotation, DimExpr, LinearType};

/// Types of names visible to a routine besides its own parameters:
/// previously checked routines. Primitive schemes are always available.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Globals {
    routines: BTreeMap<String, LinearType>,
}

impl Globals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, ty: LinearType) {
        self.routines.insert(name.to_string(), ty);
    }

    pub fn get(&self, name: &str) -> Option<&LinearType> {
        self.routines.get(name)
    }

    pub fn extend_from(&mut self, table: &BTreeMap<String, RoutineSignature>) {
        for (name, sig) in table {
            self.insert(name, sig.as_type());
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutineSignature {
    pub name: String,
    /// Declared parameter types in order; every width is a literal.
    pub params: Vec<(String, LinearType)>,
    pub result: LinearType,
    /// For each `let u ⊗ v = e` in the body (keyed by the start offset of
    /// the let), the number of qubits bound to `u`.
    pub tensor_splits: BTreeMap<usize, u32>,
}

impl RoutineSignature {
    /// The curried function type `A₁ ⊸ … ⊸ Aₙ ⊸ R`.
    pub fn as_type(&self) -> LinearType {
        self.params
            .iter()
            .rev()
            .fold(self.result.clone(), |acc, (_, p)| LinearType::lolli(p.clone(), acc))
    }
}

/// Checks one annotated lambda against the typing rules and returns its
/// signature.
pub fn check_routine(
    name: &str,
    lambda: &Node,
    globals: &Globals,
) -> Result<RoutineSignature, TypeError> {
    let NodeKind::Lambda {
        params,
        body,
        immediate_args,
    } = &lambda.kind
    else {
        return Err(TypeError::new(
            TypeErrorKind::Unsupported("a routine that is not a lambda".into()),
            lambda.span,
            "⊸I",
        ));
    };
    if immediate_args.is_some() {
        return Err(TypeError::new(
            TypeErrorKind::Unsupported("immediate invocation of a routine".into()),
            lambda.span,
            "⊸I",
        ));
    }
    let declared = annotated_params(params)?;
    let mut checker = Checker::new(globals);
    let mut ctx = TypingContext::new();
    let result = checker.abstraction(&declared, body, lambda.span, &mut ctx)?;
    let result = checker.resolve(&result).normalized();
    if result.has_vars() {
        return Err(TypeError::new(
            TypeErrorKind::DimMismatch {
                expected: "a literal width".into(),
                found: result.to_string(),
            },
            lambda.span,
            "scheme",
        ));
    }
    Ok(RoutineSignature {
        name: name.to_string(),
        params: declared
            .into_iter()
            .map(|(p, ty)| (p.name.clone(), ty))
            .collect(),
        result,
        tensor_splits: checker.splits,
    })
}

/// Synthesises the type of a single term under `ctx`, returning the context
/// left over after the term consumed what it used.
pub fn check_term(
    node: &Node,
    ctx: &TypingContext,
    globals: &Globals,
) -> Result<(LinearType, TypingContext), TypeError> {
    let mut checker = Checker::new(globals);
    let mut out = ctx.clone();
    let ty = checker.synth(node, &mut out)?;
    Ok((checker.resolve(&ty).normalized(), out))
}

/// Checks every routine of a quantum library in order. Later routines may
/// call earlier ones. The first failure aborts the whole library.
pub fn check_quantum_library(
    nodes: &[Node],
    globals: &Globals,
) -> Result<BTreeMap<String, RoutineSignature>, LibraryError> {
    let mut globals = globals.clone();
    let mut table = BTreeMap::new();
    for node in nodes {
        match &node.kind {
            NodeKind::Load { .. } => {}
            NodeKind::Assignment { name, expr } => {
                if table.contains_key(name) {
                    return Err(LibraryError {
                        routine: name.clone(),
                        error: TypeError::new(
                            TypeErrorKind::Unsupported(format!("redefinition of `{name}`")),
                            node.span,
                            "let",
                        ),
                    });
                }
                let sig = check_routine(name, expr, &globals).map_err(|error| LibraryError {
                    routine: name.clone(),
                    error,
                })?;
                globals.insert(name, sig.as_type());
                table.insert(name.clone(), sig);
            }
            _ => {
                return Err(LibraryError {
                    routine: "<top level>".into(),
                    error: TypeError::new(
                        TypeErrorKind::Unsupported(
                            "a top-level expression other than a routine definition".into(),
                        ),
                        node.span,
                        "let",
                    ),
                })
            }
        }
    }
    Ok(table)
}

fn annotated_params(params: &[Param]) -> Result<Vec<(&Param, LinearType)>, TypeError> {
    params
        .iter()
        .map(|p| match &p.ann {
            Some(ann) => Ok((p, desugar_annotation(ann))),
            None => Err(TypeError::new(
                TypeErrorKind::MissingAnnotation(p.name.clone()),
                p.span,
                "⊸I",
            )),
        })
        .collect()
}

fn linearity(rule: &'static str) -> impl Fn(UnconsumedBinding) -> TypeError {
    move |b| {
        TypeError::new(
            TypeErrorKind::LinearityViolation {
                name: b.name,
                used: b.used,
            },
            b.span,
            rule,
        )
    }
}

enum Mismatch {
    Types(LinearType, LinearType),
    Dims(String, String),
}

struct Checker<'g> {
    globals: &'g Globals,
    subst: HashMap<String, DimExpr>,
    fresh: u32,
    splits: BTreeMap<usize, u32>,
}

impl<'g> Checker<'g> {
    fn new(globals: &'g Globals) -> Self {
        Checker {
            globals,
            subst: HashMap::new(),
            fresh: 0,
            splits: BTreeMap::new(),
        }
    }

    fn resolve_dim(&self, d: &DimExpr) -> DimExpr {
        match d {
            DimExpr::Lit(_) => d.clone(),
            DimExpr::Var(v) => match self.subst.get(v) {
                Some(bound) => self.resolve_dim(bound),
                None => d.clone(),
            },
            DimExpr::Sum(parts) => {
                DimExpr::Sum(parts.iter().map(|p| self.resolve_dim(p)).collect()).simplified()
            }
        }
    }

    fn resolve(&self, ty: &LinearType) -> LinearType {
        ty.map_dims(&|d| self.resolve_dim(d))
    }

    fn instantiate(&mut self, name: &str) -> Option<LinearType> {
        self.fresh += 1;
        let k = self.fresh;
        scheme(name, &mut |v| DimExpr::Var(format!("{v}#{k}")))
    }

    // ─── unification ────────────────────────────────────────────────────

    fn unify_dims(&mut self, expected: &DimExpr, found: &DimExpr) -> Result<(), Mismatch> {
        let e = self.resolve_dim(expected).simplified();
        let f = self.resolve_dim(found).simplified();
        if e == f {
            return Ok(());
        }
        let mismatch = || Mismatch::Dims(e.to_string(), f.to_string());
        let (mut ev, el) = split_dim(&e);
        let (mut fv, fl) = split_dim(&f);
        ev.retain(|v| match fv.iter().position(|w| w == v) {
            Some(i) => {
                fv.remove(i);
                false
            }
            None => true,
        });
        match (ev.as_slice(), fv.as_slice()) {
            ([], []) if el == fl => Ok(()),
            ([], []) => Err(mismatch()),
            ([v], []) if fl > el => self.bind_dim(v, DimExpr::Lit(fl - el)),
            ([], [v]) if el > fl => self.bind_dim(v, DimExpr::Lit(el - fl)),
            ([_], []) | ([], [_]) => Err(mismatch()),
            ([v], rest) if fl >= el => {
                let mut parts: Vec<DimExpr> = rest.iter().map(|w| DimExpr::var(w)).collect();
                parts.push(DimExpr::Lit(fl - el));
                self.bind_dim(v, DimExpr::Sum(parts).simplified())
            }
            (rest, [v]) if el >= fl => {
                let mut parts: Vec<DimExpr> = rest.iter().map(|w| DimExpr::var(w)).collect();
                parts.push(DimExpr::Lit(el - fl));
                self.bind_dim(v, DimExpr::Sum(parts).simplified())
            }
            _ => Err(mismatch()),
        }
    }

    fn bind_dim(&mut self, var: &str, value: DimExpr) -> Result<(), Mismatch> {
        self.subst.insert(var.to_string(), value);
        Ok(())
    }

    fn unify(&mut self, expected: &LinearType, found: &LinearType) -> Result<(), Mismatch> {
        use LinearType as T;
        let e = self.resolve(expected).normalized();
        let f = self.resolve(found).normalized();
        if let (Some(a), Some(b)) = (e.qubit_dim(), f.qubit_dim()) {
            return self.unify_dims(&a, &b);
        }
        match (&e, &f) {
            (T::Int, T::Int) | (T::List, T::List) => Ok(()),
            (T::Bang(a), T::Bang(b)) => self.unify(a, b),
            (T::Lolli(a1, b1), T::Lolli(a2, b2)) | (T::Tensor(a1, b1), T::Tensor(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ => Err(Mismatch::Types(e, f)),
        }
    }

    fn mismatch_error(&self, m: Mismatch, span: Span, rule: &'static str) -> TypeError {
        let kind = match m {
            Mismatch::Types(expected, found) => TypeErrorKind::TypeMismatch {
                expected: self.resolve(&expected).normalized(),
                found: self.resolve(&found).normalized(),
            },
            Mismatch::Dims(expected, found) => TypeErrorKind::DimMismatch { expected, found },
        };
        TypeError::new(kind, span, rule)
    }

    // ─── terms ──────────────────────────────────────────────────────────

    fn var(&mut self, name: &str, span: Span, ctx: &mut TypingContext) -> Result<LinearType, TypeError> {
        if let Some(b) = ctx.use_var(name) {
            return Ok(b.ty.clone());
        }
        if let Some(ty) = self.globals.get(name) {
            return Ok(ty.clone());
        }
        self.instantiate(name).ok_or_else(|| {
            TypeError::new(TypeErrorKind::UnknownName(name.to_string()), span, "var")
        })
    }

    fn synth(&mut self, node: &Node, ctx: &mut TypingContext) -> Result<LinearType, TypeError> {
        let unsupported = |what: &str| {
            Err(TypeError::new(
                TypeErrorKind::Unsupported(what.to_string()),
                node.span,
                "term",
            ))
        };
        match &node.kind {
            NodeKind::Name(name) => self.var(name, node.span, ctx),
            NodeKind::IntLit(_) => Ok(LinearType::Int),
            NodeKind::ListLit(elems) => {
                for elem in elems {
                    let ty = self.synth(elem, ctx)?;
                    if self.resolve(&ty).derelict() != &LinearType::Int {
                        return Err(TypeError::new(
                            TypeErrorKind::TypeMismatch {
                                expected: LinearType::Int,
                                found: self.resolve(&ty).normalized(),
                            },
                            elem.span,
                            "list",
                        ));
                    }
                }
                Ok(LinearType::List)
            }
            NodeKind::Call { callee, args } => {
                let rule = match &callee.kind {
                    NodeKind::Name(n) if matches!(n.as_str(), "⊗" | "tensor") => "⊗I",
                    _ => "⊸E",
                };
                let fty = self.synth(callee, ctx)?;
                let result = self.apply(fty, args, ctx, node.span, rule)?;
                if let NodeKind::Name(n) = &callee.kind {
                    if n == "subsystems" && ctx.lookup(n).is_none() && self.globals.get(n).is_none() {
                        self.check_subsystems_config(&result, args)?;
                    }
                }
                Ok(result)
            }
            NodeKind::InfixCall { lhs, op, rhs } => {
                let fty = self.var(op, node.span, ctx)?;
                let args = [(**lhs).clone(), (**rhs).clone()];
                let rule = if matches!(op.as_str(), "⊗" | "tensor") { "⊗I" } else { "⊸E" };
                self.apply(fty, &args, ctx, node.span, rule)
            }
            NodeKind::PrefixCall { op, arg } => {
                let fty = self.var(op, node.span, ctx)?;
                self.apply(fty, std::slice::from_ref(&**arg), ctx, node.span, "⊸E")
            }
            NodeKind::Composition { names, args } => {
                let (last, outer) = names.split_last().expect("composition has names");
                let fty = self.var(last, node.span, ctx)?;
                let mut ty = self.apply(fty, args, ctx, node.span, "⊸E")?;
                for name in outer.iter().rev() {
                    let fty = self.var(name, node.span, ctx)?;
                    let (param, ret) = self.expect_function(fty, node.span)?;
                    self.accept(&param, &ty, false, node.span, "⊸E")?;
                    ty = ret;
                }
                Ok(ty)
            }
            NodeKind::Lambda {
                params,
                body,
                immediate_args,
            } => {
                let declared = annotated_params(params).map_err(|mut e| {
                    e.kind = TypeErrorKind::Unsupported("an unannotated lambda".into());
                    e
                })?;
                let result = self.abstraction(&declared, body, node.span, ctx)?;
                let fty = declared
                    .iter()
                    .rev()
                    .fold(result, |acc, (_, p)| LinearType::lolli(p.clone(), acc));
                match immediate_args {
                    Some(args) => self.apply(fty, args, ctx, node.span, "⊸E"),
                    None => Ok(fty),
                }
            }
            NodeKind::Assignment { expr, .. } => self.synth(expr, ctx),
            NodeKind::TensorLet { .. } => unsupported("`let u ⊗ v` outside a body"),
            NodeKind::IfElse { .. } => unsupported("a conditional"),
            NodeKind::Load { .. } => unsupported("a load directive"),
            NodeKind::FloatLit(_) => unsupported("a float literal"),
            NodeKind::ComplexLit { .. } => unsupported("a complex literal"),
            NodeKind::BoolLit(_) => unsupported("a boolean literal"),
            NodeKind::StringLit(_) => unsupported("a string literal"),
        }
    }

    /// ⊸I: binds the parameters, checks the body, and requires every linear
    /// parameter to be consumed exactly once.
    fn abstraction(
        &mut self,
        params: &[(&Param, LinearType)],
        body: &[Node],
        span: Span,
        ctx: &mut TypingContext,
    ) -> Result<LinearType, TypeError> {
        let mark = ctx.mark();
        for (p, ty) in params {
            ctx.bind(&p.name, ty.clone(), p.span);
        }
        let result = self.body(body, span, ctx)?;
        ctx.pop_to(mark).map_err(linearity("⊸I"))?;
        Ok(result)
    }

    fn body(&mut self, body: &[Node], span: Span, ctx: &mut TypingContext) -> Result<LinearType, TypeError> {
        let Some((last, init)) = body.split_last() else {
            return Err(TypeError::new(
                TypeErrorKind::Unsupported("an empty body".into()),
                span,
                "⊸I",
            ));
        };
        let mark = ctx.mark();
        for node in init {
            match &node.kind {
                NodeKind::Assignment { name, expr } => {
                    let ty = self.synth(expr, ctx)?;
                    ctx.bind(name, self.resolve(&ty), node.span);
                }
                NodeKind::TensorLet { left, right, expr } => {
                    self.tensor_let(left, right, expr, node.span, ctx)?;
                }
                _ => {
                    let ty = self.synth(node, ctx)?;
                    let ty = self.resolve(&ty).normalized();
                    if !ty.is_unrestricted() {
                        return Err(TypeError::new(
                            TypeErrorKind::DiscardedLinear(ty),
                            node.span,
                            "weakening",
                        ));
                    }
                }
            }
        }
        let result = match &last.kind {
            NodeKind::TensorLet { .. } => {
                return Err(TypeError::new(
                    TypeErrorKind::Unsupported("a body ending in `let u ⊗ v`".into()),
                    last.span,
                    "⊗E",
                ))
            }
            _ => self.synth(last, ctx)?,
        };
        ctx.pop_to(mark).map_err(linearity("let"))?;
        Ok(result)
    }

    /// ⊗E over qubit registers. The split point comes from the binder
    /// annotations, the tensor structure of the bound term, or, for two
    /// qubits, the only possible 1 + 1 split.
    fn tensor_let(
        &mut self,
        left: &Param,
        right: &Param,
        expr: &Node,
        span: Span,
        ctx: &mut TypingContext,
    ) -> Result<(), TypeError> {
        let ty = self.synth(expr, ctx)?;
        let ty = self.resolve(&ty);
        let ty = match ty {
            LinearType::Bang(inner) => *inner,
            other => other,
        };
        let err = |kind| TypeError::new(kind, span, "⊗E");
        let Some(total) = ty.qubit_count() else {
            return Err(err(TypeErrorKind::Unsupported(format!(
                "destructuring a value of type {ty}"
            ))));
        };
        let width = |p: &Param| -> Result<Option<u32>, TypeError> {
            match &p.ann {
                None => Ok(None),
                Some(ann) => desugar_annotation(ann).qubit_count().map(Some).ok_or_else(|| {
                    TypeError::new(
                        TypeErrorKind::Unsupported(format!("binding `{}` to a non-qubit type", p.name)),
                        p.span,
                        "⊗E",
                    )
                }),
            }
        };
        let l = match (width(left)?, width(right)?) {
            (Some(a), Some(b)) => {
                if a + b != total {
                    return Err(err(TypeErrorKind::DimMismatch {
                        expected: total.to_string(),
                        found: (a + b).to_string(),
                    }));
                }
                a
            }
            (Some(a), None) => a,
            (None, Some(b)) => total.saturating_sub(b),
            (None, None) => match &ty {
                LinearType::Tensor(a, _) if a.qubit_count().is_some() => a.qubit_count().unwrap(),
                _ if total == 2 => 1,
                _ => return Err(err(TypeErrorKind::MissingAnnotation(left.name.clone()))),
            },
        };
        if l == 0 || l >= total {
            return Err(err(TypeErrorKind::DimMismatch {
                expected: format!("a split of {total}"),
                found: l.to_string(),
            }));
        }
        self.splits.insert(span.start, l);
        ctx.bind_linear(&left.name, LinearType::qubits(l), left.span);
        ctx.bind_linear(&right.name, LinearType::qubits(total - l), right.span);
        Ok(())
    }

    fn expect_function(&self, fty: LinearType, span: Span) -> Result<(LinearType, LinearType), TypeError> {
        let mut f = self.resolve(&fty);
        while let LinearType::Bang(inner) = f {
            f = *inner;
        }
        match f {
            LinearType::Lolli(param, ret) => Ok((*param, *ret)),
            other => Err(TypeError::new(
                TypeErrorKind::NotAFunction(other.normalized()),
                span,
                "⊸E",
            )),
        }
    }

    /// ⊸E, once per argument, threading the context left to right.
    fn apply(
        &mut self,
        fty: LinearType,
        args: &[Node],
        ctx: &mut TypingContext,
        span: Span,
        rule: &'static str,
    ) -> Result<LinearType, TypeError> {
        let mut fty = fty;
        for arg in args {
            let (param, ret) = self.expect_function(fty, span)?;
            let before = ctx.linear_uses();
            let found = self.synth(arg, ctx)?;
            let consumed = ctx.linear_uses() > before;
            self.accept(&param, &found, consumed, arg.span, rule)?;
            fty = ret;
        }
        Ok(self.resolve(&fty))
    }

    /// Matches an argument against a parameter type, with dereliction of a
    /// `!` argument and promotion (!-I) of a term that consumed nothing linear.
    fn accept(
        &mut self,
        param: &LinearType,
        found: &LinearType,
        consumed: bool,
        span: Span,
        rule: &'static str,
    ) -> Result<(), TypeError> {
        let param = self.resolve(param).normalized();
        let found = self.resolve(found).normalized();
        let outcome = match (&param, &found) {
            (LinearType::Bang(a), LinearType::Bang(b)) => self.unify(a, b),
            (LinearType::Bang(a), other) => {
                if consumed {
                    return Err(TypeError::new(TypeErrorKind::PromotionError, span, "!-I"));
                }
                self.unify(a, other)
            }
            (a, LinearType::Bang(b)) => self.unify(a, b),
            (a, b) => self.unify(a, b),
        };
        outcome.map_err(|m| self.mismatch_error(m, span, rule))
    }

    fn check_subsystems_config(&self, result: &LinearType, args: &[Node]) -> Result<(), TypeError> {
        let Some(NodeKind::ListLit(elems)) = args.get(1).map(|a| &a.kind) else {
            return Ok(());
        };
        let mut sum = 0i64;
        for e in elems {
            match e.kind {
                NodeKind::IntLit(c) if c >= 1 => sum += c,
                NodeKind::IntLit(c) => {
                    return Err(TypeError::new(
                        TypeErrorKind::DimMismatch {
                            expected: "a positive subsystem width".into(),
                            found: c.to_string(),
                        },
                        e.span,
                        "subsystems",
                    ))
                }
                _ => return Ok(()),
            }
        }
        if let Some(n) = self.resolve(result).derelict().qubit_count() {
            if sum != i64::from(n) {
                return Err(TypeError::new(
                    TypeErrorKind::DimMismatch {
                        expected: n.to_string(),
                        found: sum.to_string(),
                    },
                    args[1].span,
                    "subsystems",
                ));
            }
        }
        Ok(())
    }
}

/// Splits a simplified width into its variables and its literal part.
fn split_dim(d: &DimExpr) -> (Vec<String>, u32) {
    match d {
        DimExpr::Lit(n) => (vec![], *n),
        DimExpr::Var(v) => (vec![v.clone()], 0),
        DimExpr::Sum(parts) => {
            let mut vars = Vec::new();
            let mut lit = 0;
            for p in parts {
                let (v, l) = split_dim(p);
                vars.extend(v);
                lit += l;
            }
            (vars, lit)
        }
    }
}
