use std::collections::BTreeMap;
use std::rc::Rc;

use num_complex::Complex64;

use crate::qcore::norm;
use crate::syntax::{Binder, Node, NodeKind, Span};

use super::constraints::check_constraints;
use super::env::Env;
use super::error::{ErrorKind, RuntimeError};
use super::value::{Builtin, Closure, Value};
use super::Interpreter;

/// Largest relative error accepted when splitting a register with `let u ⊗ v`.
const FACTOR_TOLERANCE: f64 = 1e-9;

const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 4 * 1024 * 1024;

/// Where the code being evaluated came from.
#[derive(Clone)]
pub(crate) struct Frame {
    pub source: usize,
    pub splits: Option<Rc<BTreeMap<usize, u32>>>,
}

impl Frame {
    pub fn top(source: usize) -> Self {
        Frame { source, splits: None }
    }
}

type R = Result<Value, RuntimeError>;

impl Interpreter {
    pub(crate) fn eval(&mut self, node: &Node, env: &Env, frame: &Frame) -> R {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || {
            self.eval_inner(node, env, frame)
                .map_err(|e| e.located(node.span, frame.source))
        })
    }

    /// Evaluates a body in `env`; its value is that of the last expression,
    /// and an empty body evaluates to the empty list.
    pub(crate) fn eval_body(&mut self, body: &[Node], env: &Env, frame: &Frame) -> R {
        let mut last = Value::empty();
        for node in body {
            last = self.eval(node, env, frame)?;
        }
        Ok(last)
    }

    fn eval_all(&mut self, nodes: &[Node], env: &Env, frame: &Frame) -> Result<Vec<Value>, RuntimeError> {
        nodes.iter().map(|n| self.eval(n, env, frame)).collect()
    }

    fn lookup(&self, name: &str, env: &Env, span: Span) -> R {
        env.lookup(name)
            .ok_or_else(|| RuntimeError::at(ErrorKind::UnboundName(name.to_string()), span))
    }

    fn eval_inner(&mut self, node: &Node, env: &Env, frame: &Frame) -> R {
        let span = node.span;
        match &node.kind {
            NodeKind::IntLit(i) => Ok(Value::Int(*i)),
            NodeKind::FloatLit(x) => Ok(Value::Float(*x)),
            NodeKind::ComplexLit { re, im } => Ok(Value::Complex(Complex64::new(*re, *im))),
            NodeKind::BoolLit(b) => Ok(Value::Bool(*b)),
            NodeKind::StringLit(s) => Ok(Value::Str(s.as_str().into())),
            NodeKind::Name(n) => self.lookup(n, env, span),
            NodeKind::ListLit(elems) => Ok(Value::seq(self.eval_all(elems, env, frame)?)),
            NodeKind::Load { quantum, name } => {
                self.load_module(name, *quantum, span, frame.source)?;
                Ok(Value::empty())
            }
            NodeKind::Assignment { name, expr } => {
                let value = self.eval(expr, env, frame)?;
                env.define(name, value.clone())
                    .map_err(|_| RuntimeError::at(ErrorKind::Rebind(name.clone()), span))?;
                Ok(value)
            }
            NodeKind::TensorLet { left, right, expr } => {
                let value = self.eval(expr, env, frame)?;
                let (u, v) = self.split_register(node, left, right, &value, frame)?;
                for (binder, part) in [(left, u), (right, v)] {
                    env.define(&binder.name, part)
                        .map_err(|_| RuntimeError::at(ErrorKind::Rebind(binder.name.clone()), binder.span))?;
                }
                Ok(value)
            }
            NodeKind::Lambda {
                params,
                body,
                immediate_args,
            } => {
                let closure = Value::Closure(Rc::new(Closure {
                    params: params.iter().map(|p| p.name.clone()).collect(),
                    supplied: Vec::new(),
                    body: body.as_slice().into(),
                    env: env.clone(),
                    signature: None,
                    splits: frame.splits.clone(),
                    source: frame.source,
                }));
                match immediate_args {
                    Some(args) => {
                        let args = self.eval_all(args, env, frame)?;
                        self.apply_value(&closure, &args, span)
                    }
                    None => Ok(closure),
                }
            }
            NodeKind::Call { callee, args } => {
                let f = self.eval(callee, env, frame)?;
                let args = self.eval_all(args, env, frame)?;
                self.apply_value(&f, &args, span)
            }
            NodeKind::InfixCall { lhs, op, rhs } => {
                let a = self.eval(lhs, env, frame)?;
                let f = self.lookup(op, env, span)?;
                let b = self.eval(rhs, env, frame)?;
                self.apply_value(&f, &[a, b], span)
            }
            NodeKind::PrefixCall { op, arg } => {
                let f = self.lookup(op, env, span)?;
                let a = self.eval(arg, env, frame)?;
                self.apply_value(&f, &[a], span)
            }
            NodeKind::Composition { names, args } => {
                let functions = names
                    .iter()
                    .map(|n| self.lookup(n, env, span))
                    .collect::<Result<Vec<_>, _>>()?;
                let args = self.eval_all(args, env, frame)?;
                let (innermost, rest) = functions.split_last().expect("composition has two or more names");
                let mut value = self.apply_value(innermost, &args, span)?;
                for f in rest.iter().rev() {
                    value = self.apply_value(f, &[value], span)?;
                }
                Ok(value)
            }
            NodeKind::IfElse {
                cond,
                then_body,
                else_body,
            } => {
                let arm = match self.eval(cond, env, frame)? {
                    Value::Bool(true) => then_body,
                    Value::Bool(false) => else_body,
                    other => {
                        return Err(RuntimeError::dynamic(
                            format!("condition must be a boolean, found {} `{other}`", other.type_name()),
                            cond.span,
                        ))
                    }
                };
                self.eval_body(arm, &env.child(), frame)
            }
        }
    }

    /// Calls a function value. Supplying fewer arguments than it expects
    /// returns a partially applied function; routines validate every
    /// argument they receive against their signature first.
    pub fn apply_value(&mut self, callee: &Value, args: &[Value], span: Span) -> R {
        match callee {
            Value::Closure(c) => self.apply_closure(c, args, span),
            Value::Builtin(b) => self.apply_builtin(b, args, span),
            Value::Seq(_) if args.len() == 1 && callee.as_matrix().is_some() => {
                super::builtins::apply(self, &[callee.clone(), args[0].clone()], span)
            }
            other => Err(RuntimeError::dynamic(
                format!("cannot call {} `{other}`", other.type_name()),
                span,
            )),
        }
    }

    fn apply_closure(&mut self, c: &Rc<Closure>, args: &[Value], span: Span) -> R {
        let have = c.supplied.len();
        let total = have + args.len();
        let name = || match &c.signature {
            Some(sig) => sig.name.clone(),
            None => "lambda".to_string(),
        };
        if total > c.params.len() {
            return Err(RuntimeError::at(
                ErrorKind::Arity {
                    callee: name(),
                    expected: c.params.len() - have,
                    found: args.len(),
                },
                span,
            ));
        }
        if let Some(sig) = &c.signature {
            check_constraints(sig, have, args).map_err(|k| RuntimeError::at(k, span))?;
        }
        let mut supplied = c.supplied.clone();
        supplied.extend_from_slice(args);
        if total < c.params.len() {
            return Ok(Value::Closure(Rc::new(Closure {
                params: c.params.clone(),
                supplied,
                body: c.body.clone(),
                env: c.env.clone(),
                signature: c.signature.clone(),
                splits: c.splits.clone(),
                source: c.source,
            })));
        }
        if self.depth >= self.recursion_limit {
            return Err(RuntimeError::at(ErrorKind::RecursionLimit(self.recursion_limit), span));
        }
        let scope = c.env.child();
        for (p, v) in c.params.iter().zip(supplied) {
            scope.define(p, v).expect("parameter names are distinct");
        }
        let frame = Frame {
            source: c.source,
            splits: c.splits.clone(),
        };
        self.depth += 1;
        let result = self.eval_body(&c.body, &scope, &frame);
        self.depth -= 1;
        result
    }

    fn apply_builtin(&mut self, b: &Rc<Builtin>, args: &[Value], span: Span) -> R {
        let total = b.supplied.len() + args.len();
        if total > b.arity {
            return Err(RuntimeError::at(
                ErrorKind::Arity {
                    callee: b.name.to_string(),
                    expected: b.arity - b.supplied.len(),
                    found: args.len(),
                },
                span,
            ));
        }
        let mut all = b.supplied.clone();
        all.extend_from_slice(args);
        if total < b.arity {
            return Ok(Value::Builtin(Rc::new(Builtin {
                name: b.name,
                arity: b.arity,
                supplied: all,
                func: b.func,
            })));
        }
        (b.func)(self, &all, span)
    }

    /// Splits a product state into its two factors for `let u ⊗ v = e`.
    fn split_register(
        &self,
        node: &Node,
        left: &Binder,
        right: &Binder,
        value: &Value,
        frame: &Frame,
    ) -> Result<(Value, Value), RuntimeError> {
        let span = node.span;
        let v = match value.as_vector() {
            Some(v) if v.len() >= 4 && v.len().is_power_of_two() => v,
            _ => {
                return Err(RuntimeError::dynamic(
                    format!("`let {} ⊗ {}` needs a register of at least 2 qubits, found `{value}`", left.name, right.name),
                    span,
                ))
            }
        };
        let n = v.len().trailing_zeros();
        let k = frame
            .splits
            .as_ref()
            .and_then(|s| s.get(&span.start).copied())
            .or_else(|| left.ann.as_ref().and_then(|a| a.qubit_count()))
            .or_else(|| right.ann.as_ref().and_then(|a| a.qubit_count()).map(|r| n.saturating_sub(r)))
            .or((n == 2).then_some(1));
        let k = match k {
            Some(k) if k >= 1 && k < n => k,
            _ => {
                return Err(RuntimeError::dynamic(
                    format!("cannot tell how to split a {n}-qubit register; annotate `{}`", left.name),
                    span,
                ))
            }
        };
        let (u, w) = factorize(&v, k).ok_or_else(|| {
            RuntimeError::dynamic(
                format!("the state is entangled across the split after qubit {k} and cannot be destructured"),
                span,
            )
        })?;
        Ok((Value::from_vector(&u), Value::from_vector(&w)))
    }
}

/// Writes `v` (length `2^n`) as `u ⊗ w` with `u` on the first `k` qubits,
/// both normalised like `v`. `None` if `v` is not a product across the split.
pub(crate) fn factorize(v: &[Complex64], k: u32) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let cols = v.len() >> k;
    let rows = 1usize << k;
    let at = |i: usize, j: usize| v[i * cols + j];
    let (mut i0, mut j0, mut best) = (0, 0, -1.0);
    for (idx, a) in v.iter().enumerate() {
        if a.norm() > best {
            best = a.norm();
            i0 = idx / cols;
            j0 = idx % cols;
        }
    }
    if best <= 0.0 {
        return None;
    }
    let pivot = at(i0, j0);
    let mut u: Vec<Complex64> = (0..rows).map(|i| at(i, j0)).collect();
    let mut w: Vec<Complex64> = (0..cols).map(|j| at(i0, j) / pivot).collect();
    let scale = norm(v).max(f64::MIN_POSITIVE);
    for (i, ui) in u.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            if (ui * wj - at(i, j)).norm() > FACTOR_TOLERANCE * scale {
                return None;
            }
        }
    }
    let nu = norm(&u);
    let nw = norm(&w);
    let total = nu * nw;
    for x in &mut u {
        *x /= nu;
    }
    // Give all of the original norm to w; for unit-norm v both are unit vectors.
    for x in &mut w {
        *x *= total / nw;
    }
    Some((u, w))
}
