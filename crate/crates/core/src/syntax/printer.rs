//! Canonical source rendering of syntax trees. Output re-parses to a tree
//! equal to the input up to spans.

use std::fmt::{self, Display, Write};

use super::ast::{Node, NodeKind, Param};

/// Renders a program, one top-level expression per line.
pub fn print_program(nodes: &[Node]) -> String {
    let mut out = String::new();
    for node in nodes {
        let _ = writeln!(out, "{node}");
    }
    out
}

/// Formats a float so that the literal grammar accepts it back.
pub(crate) fn float_literal(value: f64) -> String {
    let mut s = format!("{value}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}

fn join<T: Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn body(nodes: &[Node]) -> String {
    if nodes.is_empty() {
        "{}".to_string()
    } else {
        format!("{{ {} }}", join(nodes, " "))
    }
}

impl Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ann {
            Some(ann) => write!(f, "{} : {}", self.name, ann),
            None => f.write_str(&self.name),
        }
    }
}

impl Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Load { quantum, name } => {
                write!(f, "{} {}", if *quantum { "--qload" } else { "--load" }, name)
            }
            NodeKind::Assignment { name, expr } => write!(f, "let {name} = {expr}"),
            NodeKind::TensorLet { left, right, expr } => {
                write!(f, "let {left} ⊗ {right} = {expr}")
            }
            NodeKind::Lambda {
                params,
                body: b,
                immediate_args,
            } => {
                write!(f, "lambda({}){}", join(params, ", "), body(b))?;
                if let Some(args) = immediate_args {
                    write!(f, "({})", join(args, ", "))?;
                }
                Ok(())
            }
            NodeKind::Call { callee, args } => write!(f, "{}({})", callee, join(args, ", ")),
            NodeKind::InfixCall { lhs, op, rhs } => write!(f, "({lhs} {op} {rhs})"),
            NodeKind::PrefixCall { op, arg } => write!(f, "({op} {arg})"),
            NodeKind::Composition { names, args } => {
                write!(f, "{}({})", names.join(" . "), join(args, ", "))
            }
            NodeKind::IfElse {
                cond,
                then_body,
                else_body,
            } => write!(f, "if({cond}){} else {}", body(then_body), body(else_body)),
            NodeKind::ListLit(elems) => write!(f, "[{}]", join(elems, " ")),
            NodeKind::IntLit(v) => write!(f, "{v}"),
            NodeKind::FloatLit(v) => f.write_str(&float_literal(*v)),
            NodeKind::ComplexLit { re, im } => {
                let sign = if im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", re, sign, im.abs())
            }
            NodeKind::BoolLit(b) => f.write_str(if *b { "#t" } else { "#f" }),
            NodeKind::StringLit(s) => write!(f, "\"{s}\""),
            NodeKind::Name(n) => f.write_str(n),
        }
    }
}
