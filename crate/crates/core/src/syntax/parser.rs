//! Backtracking PEG parser for Qumin source.
//!
//! Every rule is a function from a start offset to `Option<(T, end)>`. Failed
//! token matches are recorded so that an overall failure can be reported at
//! the farthest offset the parser reached, together with what it expected
//! there. `expr` is memoised by offset, which keeps nested parenthesised
//! forms (tried first as infix, then as prefix calls) linear.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::ast::{Node, NodeKind, Param, Span, TypeAnnotation};

const RESERVED: [&str; 4] = ["let", "lambda", "if", "else"];

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind}")]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    /// No rule matched; the set lists what would have been accepted at `span.start`.
    Expected(Vec<String>),
    TrailingInput,
    DuplicateParameter(String),
    ZeroWidthOperator,
    IntegerOutOfRange,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Expected(set) if set.is_empty() => f.write_str("unexpected input"),
            ParseErrorKind::Expected(set) => write!(f, "expected one of: {}", set.join(", ")),
            ParseErrorKind::TrailingInput => f.write_str("unexpected trailing input"),
            ParseErrorKind::DuplicateParameter(name) => {
                write!(f, "parameter `{name}` is declared twice")
            }
            ParseErrorKind::ZeroWidthOperator => f.write_str("operator[n] requires n >= 1"),
            ParseErrorKind::IntegerOutOfRange => f.write_str("integer literal out of range"),
        }
    }
}

/// Parses a whole program: a sequence of expressions.
pub fn parse_program(source: &str) -> Result<Vec<Node>, ParseError> {
    let mut p = Parser::new(source);
    let mut nodes = Vec::new();
    let mut pos = p.ws(0);
    while pos < source.len() {
        match p.expr(pos) {
            Some((node, next)) => {
                nodes.push(node);
                pos = next;
            }
            None => return Err(p.failure()),
        }
    }
    p.finish(nodes)
}

/// Parses exactly one expression; anything but whitespace after it is an error.
pub fn parse_expr(source: &str) -> Result<Node, ParseError> {
    let mut p = Parser::new(source);
    let Some((node, end)) = p.expr(0) else {
        return Err(p.failure());
    };
    let node = p.finish(node)?;
    if end < source.len() {
        return Err(ParseError {
            span: Span::new(end, source.len()),
            kind: ParseErrorKind::TrailingInput,
        });
    }
    Ok(node)
}

/// Parses a routine parameter type such as `!{operator[2]}` or `qubit * qubit`.
pub fn parse_type_annotation(source: &str) -> Result<TypeAnnotation, ParseError> {
    let mut p = Parser::new(source);
    let start = p.ws(0);
    let Some((ty, end)) = p.ty(start) else {
        return Err(p.failure());
    };
    let ty = p.finish(ty)?;
    let end = p.ws(end);
    if end < source.len() {
        return Err(ParseError {
            span: Span::new(end, source.len()),
            kind: ParseErrorKind::TrailingInput,
        });
    }
    Ok(ty)
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_ascii_alphabetic() || matches!(c, '⊗' | '·' | '+' | '-' | '/' | '*' | '=' | '?')
}

fn is_lvalue_char(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '?'
}

struct Parser<'s> {
    src: &'s str,
    farthest: usize,
    expected: BTreeSet<&'static str>,
    memo: HashMap<usize, Option<(Node, usize)>>,
    hard: Option<ParseError>,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        Parser {
            src,
            farthest: 0,
            expected: BTreeSet::new(),
            memo: HashMap::new(),
            hard: None,
        }
    }

    fn finish<T>(&mut self, value: T) -> Result<T, ParseError> {
        match self.hard.take() {
            Some(err) => Err(err),
            None => Ok(value),
        }
    }

    fn failure(&mut self) -> ParseError {
        if let Some(err) = self.hard.take() {
            return err;
        }
        let start = self.farthest.min(self.src.len());
        let end = self.src[start..]
            .chars()
            .next()
            .map_or(start, |c| start + c.len_utf8());
        ParseError {
            span: Span::new(start, end),
            kind: ParseErrorKind::Expected(self.expected.iter().map(|s| s.to_string()).collect()),
        }
    }

    fn hard_error(&mut self, span: Span, kind: ParseErrorKind) {
        if self.hard.is_none() {
            self.hard = Some(ParseError { span, kind });
        }
    }

    fn expect(&mut self, pos: usize, what: &'static str) {
        if pos > self.farthest {
            self.farthest = pos;
            self.expected.clear();
        }
        if pos == self.farthest {
            self.expected.insert(what);
        }
    }

    fn peek(&self, pos: usize) -> Option<char> {
        self.src.get(pos..).and_then(|s| s.chars().next())
    }

    /// Whitespace and `//` line comments.
    fn ws(&self, mut pos: usize) -> usize {
        let bytes = self.src.as_bytes();
        while pos < bytes.len() {
            match bytes[pos] {
                b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
                b'/' if bytes.get(pos + 1) == Some(&b'/') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        pos
    }

    fn lit(&mut self, pos: usize, text: &'static str) -> Option<usize> {
        if self.src[pos..].starts_with(text) {
            Some(pos + text.len())
        } else {
            self.expect(pos, text);
            None
        }
    }

    /// A keyword that must not run on into further letters.
    fn kw(&mut self, pos: usize, word: &'static str) -> Option<usize> {
        let end = self.lit(pos, word)?;
        match self.peek(end) {
            Some(c) if c.is_ascii_alphanumeric() || c == '?' => {
                self.expect(pos, word);
                None
            }
            _ => Some(end),
        }
    }

    fn take_while(&self, pos: usize, pred: impl Fn(char) -> bool) -> usize {
        let rest = &self.src[pos..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !pred(c))
            .map_or(rest.len(), |(i, _)| i);
        pos + len
    }

    fn numeral(&mut self, pos: usize) -> Option<usize> {
        let end = self.take_while(pos, |c| c.is_ascii_digit());
        if end == pos {
            self.expect(pos, "digit");
            None
        } else {
            Some(end)
        }
    }

    fn name(&mut self, pos: usize) -> Option<(String, usize)> {
        let end = self.take_while(pos, is_name_char);
        let text = &self.src[pos..end];
        if end == pos || RESERVED.contains(&text) {
            self.expect(pos, "name");
            return None;
        }
        Some((text.to_string(), end))
    }

    /// `lvalue ← [a-zA-Z?]+ _`
    fn lvalue(&mut self, pos: usize) -> Option<(String, Span, usize)> {
        let end = self.take_while(pos, is_lvalue_char);
        let text = &self.src[pos..end];
        if end == pos || RESERVED.contains(&text) {
            self.expect(pos, "identifier");
            return None;
        }
        Some((text.to_string(), Span::new(pos, end), self.ws(end)))
    }

    fn expr(&mut self, pos: usize) -> Option<(Node, usize)> {
        if let Some(hit) = self.memo.get(&pos) {
            return hit.clone();
        }
        let start = self.ws(pos);
        let result = self.expr_body(start).map(|(kind, end)| {
            // Forms ending in a nested expression would otherwise absorb its
            // trailing whitespace.
            let span_end = match &kind {
                NodeKind::Assignment { expr, .. } | NodeKind::TensorLet { expr, .. } => {
                    expr.span.end
                }
                _ => end,
            };
            let node = Node::new(kind, Span::new(start, span_end));
            (node, self.ws(end))
        });
        if result.is_none() {
            self.expect(start, "expression");
        }
        self.memo.insert(pos, result.clone());
        result
    }

    fn expr_body(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        if let Some(r) = self.load(p) {
            return Some(r);
        }
        if let Some(r) = self.func(p) {
            return Some(r);
        }
        if let Some(r) = self.ifelse(p) {
            return Some(r);
        }
        if let Some(r) = self.call(p) {
            return Some(r);
        }
        if let Some(r) = self.comp(p) {
            return Some(r);
        }
        if let Some(r) = self.infix(p) {
            return Some(r);
        }
        if let Some(r) = self.prefix(p) {
            return Some(r);
        }
        if let Some(r) = self.list(p) {
            return Some(r);
        }
        if let Some(r) = self.assignment(p) {
            return Some(r);
        }
        if let Some(r) = self.boolean(p) {
            return Some(r);
        }
        if let Some(r) = self.string(p) {
            return Some(r);
        }
        if let Some(r) = self.complex(p) {
            return Some(r);
        }
        if let Some(r) = self.float(p) {
            return Some(r);
        }
        if let Some(r) = self.int(p) {
            return Some(r);
        }
        self.name(p).map(|(n, end)| (NodeKind::Name(n), end))
    }

    fn load(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let (quantum, q) = if let Some(q) = self.lit(p, "--load") {
            (false, q)
        } else {
            (true, self.lit(p, "--qload")?)
        };
        let q = self.ws(q);
        let (name, span, _) = self.lvalue(q)?;
        Some((NodeKind::Load { quantum, name }, span.end))
    }

    fn params(&mut self, p: usize) -> Option<(Vec<Param>, usize)> {
        let q = self.lit(p, "(")?;
        let q = self.ws(q);
        let mut params = Vec::new();
        let (first, mut q) = self.param(q)?;
        params.push(first);
        while let Some(after) = self.sep(q) {
            let (param, next) = self.param(after)?;
            params.push(param);
            q = next;
        }
        let q = self.lit(q, ")")?;
        for (i, param) in params.iter().enumerate() {
            if params[..i].iter().any(|other| other.name == param.name) {
                self.hard_error(
                    param.span,
                    ParseErrorKind::DuplicateParameter(param.name.clone()),
                );
                return None;
            }
        }
        Some((params, q))
    }

    /// `lvalue (":" type)?`
    fn param(&mut self, p: usize) -> Option<(Param, usize)> {
        let (name, span, q) = self.lvalue(p)?;
        let mut param = Param {
            name,
            ann: None,
            span,
        };
        if let Some(after) = self.lit(q, ":") {
            let after = self.ws(after);
            let (ty, end) = self.ty(after)?;
            param.ann = Some(ty);
            return Some((param, self.ws(end)));
        }
        Some((param, q))
    }

    fn sep(&mut self, p: usize) -> Option<usize> {
        let q = self.ws(p);
        let q = self.lit(q, ",")?;
        Some(self.ws(q))
    }

    fn block(&mut self, p: usize) -> Option<(Vec<Node>, usize)> {
        let mut q = self.lit(p, "{")?;
        let mut body = Vec::new();
        while let Some((node, next)) = self.expr(q) {
            body.push(node);
            q = next;
        }
        let q = self.ws(q);
        let q = self.lit(q, "}")?;
        Some((body, q))
    }

    /// Call arguments: `expr (sep expr)*` where the separator is optional, which
    /// covers both comma-separated and space-separated argument lists.
    fn args(&mut self, p: usize, allow_empty: bool) -> Option<(Vec<Node>, usize)> {
        let q = self.lit(p, "(")?;
        let mut args = Vec::new();
        let mut q = q;
        while let Some((node, next)) = self.expr(q) {
            args.push(node);
            q = self.sep(next).unwrap_or(next);
        }
        if args.is_empty() && !allow_empty {
            return None;
        }
        let q = self.ws(q);
        let q = self.lit(q, ")")?;
        Some((args, q))
    }

    fn func(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.kw(p, "lambda")?;
        let q = self.ws(q);
        let (params, q) = self.params(q)?;
        let q = self.ws(q);
        let (body, q) = self.block(q)?;
        let (immediate_args, q) = match self.peek(q) {
            Some('(') => match self.args(q, true) {
                Some((args, end)) => (Some(args), end),
                None => (None, q),
            },
            _ => (None, q),
        };
        Some((
            NodeKind::Lambda {
                params,
                body,
                immediate_args,
            },
            q,
        ))
    }

    fn ifelse(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.kw(p, "if")?;
        let q = self.ws(q);
        let q = self.lit(q, "(")?;
        let (cond, q) = self.expr(q)?;
        let q = self.lit(q, ")")?;
        let q = self.ws(q);
        let (then_body, q) = self.block(q)?;
        let q = self.ws(q);
        let q = self.kw(q, "else")?;
        let q = self.ws(q);
        let (else_body, q) = self.block(q)?;
        Some((
            NodeKind::IfElse {
                cond: Box::new(cond),
                then_body,
                else_body,
            },
            q,
        ))
    }

    /// `name "(" args ")"`, optionally followed by further argument lists.
    fn call(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let (name, q) = self.name(p)?;
        let mut callee = Node::new(NodeKind::Name(name), Span::new(p, q));
        let (args, mut q) = self.args(q, false)?;
        let mut kind = NodeKind::Call {
            callee: Box::new(callee.clone()),
            args,
        };
        while self.peek(q) == Some('(') {
            let Some((args, next)) = self.args(q, false) else {
                break;
            };
            callee = Node::new(kind, Span::new(p, q));
            kind = NodeKind::Call {
                callee: Box::new(callee.clone()),
                args,
            };
            q = next;
        }
        Some((kind, q))
    }

    fn comp(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let (first, mut q) = self.name(p)?;
        let mut names = vec![first];
        loop {
            let s = self.ws(q);
            let Some(s) = self.lit(s, ".") else { break };
            let s = self.ws(s);
            let Some((next, end)) = self.name(s) else {
                break;
            };
            names.push(next);
            q = end;
        }
        if names.len() < 2 {
            return None;
        }
        let q = self.ws(q);
        let (args, q) = self.args(q, true)?;
        Some((NodeKind::Composition { names, args }, q))
    }

    fn infix(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.lit(p, "(")?;
        let (lhs, q) = self.expr(q)?;
        let (op, q) = self.name(q)?;
        let (rhs, q) = self.expr(q)?;
        let q = self.lit(q, ")")?;
        Some((
            NodeKind::InfixCall {
                lhs: Box::new(lhs),
                op,
                rhs: Box::new(rhs),
            },
            q,
        ))
    }

    fn prefix(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.lit(p, "(")?;
        let q = self.ws(q);
        let (op, q) = self.name(q)?;
        let (arg, q) = self.expr(q)?;
        let q = self.lit(q, ")")?;
        Some((
            NodeKind::PrefixCall {
                op,
                arg: Box::new(arg),
            },
            q,
        ))
    }

    fn list(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let mut q = self.lit(p, "[")?;
        let mut elems = Vec::new();
        while let Some((node, next)) = self.expr(q) {
            elems.push(node);
            q = next;
        }
        let q = self.ws(q);
        let q = self.lit(q, "]")?;
        Some((NodeKind::ListLit(elems), q))
    }

    /// `let x = e`, plus the named-function form `let f(x, y){ ... }` and the
    /// tensor destructuring form `let u ⊗ v = e`.
    fn assignment(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.kw(p, "let")?;
        let q = self.ws(q);
        let (name, span, after_name) = self.lvalue(q)?;

        if self.peek(span.end) == Some('(') {
            let (params, r) = self.params(span.end)?;
            let r = self.ws(r);
            let (body, r) = self.block(r)?;
            let lambda = Node::new(
                NodeKind::Lambda {
                    params,
                    body,
                    immediate_args: None,
                },
                Span::new(span.end, r),
            );
            return Some((
                NodeKind::Assignment {
                    name,
                    expr: Box::new(lambda),
                },
                r,
            ));
        }

        if let Some(r) = self.lit(after_name, "=") {
            let (expr, r) = self.expr(r)?;
            return Some((
                NodeKind::Assignment {
                    name,
                    expr: Box::new(expr),
                },
                r,
            ));
        }

        let (left, r) = self.param(q)?;
        let r = self
            .lit(r, "⊗")
            .or_else(|| self.lit(r, "*"))
            .map(|r| self.ws(r))?;
        let (right, r) = self.param(r)?;
        let r = self.lit(r, "=")?;
        if left.name == right.name {
            self.hard_error(right.span, ParseErrorKind::DuplicateParameter(right.name));
            return None;
        }
        let (expr, r) = self.expr(r)?;
        Some((
            NodeKind::TensorLet {
                left,
                right,
                expr: Box::new(expr),
            },
            r,
        ))
    }

    fn boolean(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        if let Some(q) = self.lit(p, "#t") {
            return Some((NodeKind::BoolLit(true), q));
        }
        let q = self.lit(p, "#f")?;
        Some((NodeKind::BoolLit(false), q))
    }

    fn string(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = self.lit(p, "\"")?;
        let end = self.take_while(q, |c| {
            c.is_ascii_alphanumeric() || matches!(c, ' ' | '!' | '#' | '$' | '?')
        });
        let close = self.lit(end, "\"")?;
        Some((NodeKind::StringLit(self.src[q..end].to_string()), close))
    }

    /// `numeral ("." numeral)?`
    fn decimal(&mut self, p: usize) -> Option<usize> {
        let q = self.numeral(p)?;
        if self.peek(q) == Some('.') {
            if let Some(r) = self.numeral(q + 1) {
                return Some(r);
            }
        }
        Some(q)
    }

    fn sign(&self, p: usize) -> (f64, usize) {
        match self.peek(p) {
            Some('-') => (-1.0, p + 1),
            Some('+') => (1.0, p + 1),
            _ => (1.0, p),
        }
    }

    fn complex(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let (re_sign, q) = self.sign(p);
        let re_end = self.decimal(q)?;
        let re: f64 = self.src[q..re_end].parse().ok()?;
        let im_sign = match self.peek(re_end) {
            Some('+') => 1.0,
            Some('-') => -1.0,
            _ => {
                self.expect(re_end, "'+' or '-'");
                return None;
            }
        };
        let im_start = re_end + 1;
        let im_end = self.decimal(im_start)?;
        let im: f64 = self.src[im_start..im_end].parse().ok()?;
        let q = self.lit(im_end, "i")?;
        Some((
            NodeKind::ComplexLit {
                re: re_sign * re,
                im: im_sign * im,
            },
            q,
        ))
    }

    fn float(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = if self.peek(p) == Some('-') { p + 1 } else { p };
        let q = self.numeral(q)?;
        let q = self.lit(q, ".")?;
        let q = self.numeral(q)?;
        let value: f64 = self.src[p..q].parse().ok()?;
        Some((NodeKind::FloatLit(value), q))
    }

    fn int(&mut self, p: usize) -> Option<(NodeKind, usize)> {
        let q = if self.peek(p) == Some('-') { p + 1 } else { p };
        let q = self.numeral(q)?;
        match self.src[p..q].parse::<i64>() {
            Ok(value) => Some((NodeKind::IntLit(value), q)),
            Err(_) => {
                self.hard_error(Span::new(p, q), ParseErrorKind::IntegerOutOfRange);
                None
            }
        }
    }

    // ─── types ──────────────────────────────────────────────────────────────

    /// `tensor (">" type)?`: `>` is right-associative and binds looser than `*`.
    fn ty(&mut self, p: usize) -> Option<(TypeAnnotation, usize)> {
        let (lhs, q) = self.ty_tensor(p)?;
        let r = self.ws(q);
        if let Some(r) = self.lit(r, ">") {
            let r = self.ws(r);
            if let Some((rhs, end)) = self.ty(r) {
                return Some((TypeAnnotation::Fn(Box::new(lhs), Box::new(rhs)), end));
            }
        }
        Some((lhs, q))
    }

    fn ty_tensor(&mut self, p: usize) -> Option<(TypeAnnotation, usize)> {
        let (mut acc, mut q) = self.ty_atom(p)?;
        loop {
            let r = self.ws(q);
            let Some(r) = self.lit(r, "*") else { break };
            let r = self.ws(r);
            let Some((rhs, end)) = self.ty_atom(r) else {
                break;
            };
            acc = TypeAnnotation::Tensor(Box::new(acc), Box::new(rhs));
            q = end;
        }
        Some((acc, q))
    }

    fn ty_atom(&mut self, p: usize) -> Option<(TypeAnnotation, usize)> {
        if let Some(q) = self.kw(p, "qubit") {
            return Some((TypeAnnotation::Qubit, q));
        }
        if let Some(q) = self.kw(p, "int") {
            return Some((TypeAnnotation::Int, q));
        }
        if let Some(q) = self.kw(p, "list") {
            return Some((TypeAnnotation::List, q));
        }
        if let Some(q) = self.kw(p, "operator") {
            let q = self.ws(q);
            let q = self.lit(q, "[")?;
            let q = self.ws(q);
            let end = self.numeral(q)?;
            let n: u32 = match self.src[q..end].parse() {
                Ok(n) => n,
                Err(_) => {
                    self.hard_error(Span::new(q, end), ParseErrorKind::IntegerOutOfRange);
                    return None;
                }
            };
            if n == 0 {
                self.hard_error(Span::new(q, end), ParseErrorKind::ZeroWidthOperator);
                return None;
            }
            let r = self.ws(end);
            let r = self.lit(r, "]")?;
            return Some((TypeAnnotation::Operator(n), r));
        }
        if let Some(q) = self.lit(p, "!{") {
            let q = self.ws(q);
            let (inner, q) = self.ty(q)?;
            let q = self.ws(q);
            let q = self.lit(q, "}")?;
            return Some((TypeAnnotation::Bang(Box::new(inner)), q));
        }
        let q = self.lit(p, "(")?;
        let q = self.ws(q);
        let (inner, q) = self.ty(q)?;
        let q = self.ws(q);
        let q = self.lit(q, ")")?;
        Some((inner, q))
    }
}
