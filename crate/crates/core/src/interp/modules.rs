use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use crate::syntax::{parse_program, Node, NodeKind, ParseError, Span};
use crate::typesys::{check_quantum_library, RoutineSignature};

use super::error::{ErrorKind, RuntimeError};
use super::eval::Frame;
use super::value::{Closure, Value};
use super::Interpreter;

/// Canonical extension of source files.
pub const EXTENSION: &str = "qum";

fn io_error(path: &Path, e: std::io::Error) -> RuntimeError {
    RuntimeError::new(ErrorKind::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_failure(e: ParseError, source: usize) -> RuntimeError {
    let span = e.span;
    RuntimeError::at(ErrorKind::Parse(Box::new(e)), span).in_source(source)
}

fn is_load(node: &Node, quantum: bool) -> bool {
    matches!(&node.kind, NodeKind::Load { quantum: q, .. } if *q == quantum)
}

/// A top-level `let name = lambda(...)` whose parameters all carry types.
fn is_routine(node: &Node) -> bool {
    match &node.kind {
        NodeKind::Assignment { expr, .. } => match &expr.kind {
            NodeKind::Lambda {
                params,
                immediate_args: None,
                ..
            } => !params.is_empty() && params.iter().all(|p| p.ann.is_some()),
            _ => false,
        },
        _ => false,
    }
}

impl Interpreter {
    /// Runs a program file: quantum libraries, then classical libraries,
    /// then the file's own expressions. Returns the last value.
    pub fn run_file(&mut self, path: impl AsRef<Path>) -> Result<Option<Value>, RuntimeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        if self.entry_dir.is_none() {
            self.entry_dir = Some(parent_dir(path));
        }
        if let Ok(canonical) = path.canonicalize() {
            self.loaded.insert(canonical);
        }
        self.run_source(&text, &path.display().to_string())
    }

    /// Runs program text as if it were a file called `name`.
    pub fn run_source(&mut self, text: &str, name: &str) -> Result<Option<Value>, RuntimeError> {
        let source = self.add_source(name, text);
        let nodes = parse_program(text).map_err(|e| parse_failure(e, source))?;
        self.run_program(&nodes, source)
    }

    /// Evaluates one REPL entry. Returns the value to show, or `None` when
    /// the entry was a binding or a load.
    pub fn eval_repl(&mut self, text: &str) -> Result<Option<Value>, RuntimeError> {
        let name = format!("<repl:{}>", self.sources().len() + 1);
        let source = self.add_source(&name, text);
        let nodes = parse_program(text).map_err(|e| parse_failure(e, source))?;
        let value = self.run_program(&nodes, source)?;
        let silent = nodes.last().is_none_or(|n| {
            matches!(
                n.kind,
                NodeKind::Assignment { .. } | NodeKind::TensorLet { .. } | NodeKind::Load { .. }
            )
        });
        Ok(if silent { None } else { value })
    }

    fn run_program(&mut self, nodes: &[Node], source: usize) -> Result<Option<Value>, RuntimeError> {
        let frame = Frame::top(source);
        let globals = self.globals.clone();
        for quantum in [true, false] {
            for node in nodes.iter().filter(|n| is_load(n, quantum)) {
                self.eval(node, &globals, &frame)?;
            }
        }
        let mut last = None;
        for node in nodes.iter().filter(|n| !matches!(n.kind, NodeKind::Load { .. })) {
            last = Some(self.eval(node, &globals, &frame)?);
        }
        Ok(last)
    }

    fn candidates(&self, name: &str) -> Vec<PathBuf> {
        let file = format!("{name}.{EXTENSION}");
        let first = self.entry_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        std::iter::once(first)
            .chain(self.search_path.iter().cloned())
            .map(|dir| dir.join(&file))
            .collect()
    }

    fn resolve(&self, name: &str) -> Result<PathBuf, RuntimeError> {
        let candidates = self.candidates(name);
        candidates.iter().find(|p| p.is_file()).cloned().ok_or_else(|| {
            RuntimeError::new(ErrorKind::ModuleNotFound {
                name: name.to_string(),
                searched: candidates.iter().map(|p| p.display().to_string()).collect(),
            })
        })
    }

    /// Loads `name.qum` once per session. Quantum libraries are type checked
    /// in full before any of their routines is bound.
    pub(crate) fn load_module(&mut self, name: &str, quantum: bool, span: Span, from: usize) -> Result<(), RuntimeError> {
        let locate = |e: RuntimeError| e.located(span, from);
        let path = self.resolve(name).map_err(locate)?;
        let key = path.canonicalize().map_err(|e| locate(io_error(&path, e)))?;
        if self.loaded.contains(&key) {
            return Ok(());
        }
        let label = key.display().to_string();
        if self.loading.contains(&label) {
            let mut chain = self.loading.clone();
            chain.push(label);
            return Err(locate(RuntimeError::new(ErrorKind::CyclicLoad(chain))));
        }
        let text = std::fs::read_to_string(&path).map_err(|e| locate(io_error(&path, e)))?;
        self.loading.push(label);
        let result = if quantum {
            self.load_quantum(&text, &path)
        } else {
            self.run_source(&text, &path.display().to_string()).map(|_| ())
        };
        self.loading.pop();
        result?;
        self.loaded.insert(key);
        Ok(())
    }

    fn load_quantum(&mut self, text: &str, path: &Path) -> Result<(), RuntimeError> {
        let source = self.add_source(&path.display().to_string(), text);
        let nodes = parse_program(text).map_err(|e| parse_failure(e, source))?;
        let frame = Frame::top(source);
        let globals = self.globals.clone();
        for quantum in [true, false] {
            for node in nodes.iter().filter(|n| is_load(n, quantum)) {
                self.eval(node, &globals, &frame)?;
            }
        }
        let table = self.check_library(&nodes, source)?;
        for node in &nodes {
            let NodeKind::Assignment { name, expr } = &node.kind else {
                continue;
            };
            let NodeKind::Lambda { params, body, .. } = &expr.kind else {
                continue;
            };
            let sig = Rc::new(table[name].clone());
            let closure = Value::Closure(Rc::new(Closure {
                params: params.iter().map(|p| p.name.clone()).collect(),
                supplied: Vec::new(),
                body: body.as_slice().into(),
                env: self.quantum.clone(),
                signature: Some(sig.clone()),
                splits: Some(Rc::new(sig.tensor_splits.clone())),
                source,
            }));
            for env in [&self.quantum, &self.globals] {
                env.define(name, closure.clone())
                    .map_err(|_| RuntimeError::at(ErrorKind::Rebind(name.clone()), node.span).in_source(source))?;
            }
            self.routines.insert(name, sig.as_type());
            self.signatures.insert(name.clone(), sig);
        }
        Ok(())
    }

    fn check_library(&self, nodes: &[Node], source: usize) -> Result<BTreeMap<String, RoutineSignature>, RuntimeError> {
        check_quantum_library(nodes, &self.routines).map_err(|e| {
            let span = e.error.span;
            RuntimeError::at(ErrorKind::Type(Box::new(e)), span).in_source(source)
        })
    }

    /// Static check of a file without running it. The file's `--qload`
    /// libraries are checked; a file made only of typed routines is itself
    /// checked as a library. Returns every signature found.
    pub fn check_file(&mut self, path: impl AsRef<Path>) -> Result<BTreeMap<String, RoutineSignature>, RuntimeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        if self.entry_dir.is_none() {
            self.entry_dir = Some(parent_dir(path));
        }
        let source = self.add_source(&path.display().to_string(), &text);
        let nodes = parse_program(&text).map_err(|e| parse_failure(e, source))?;
        let frame = Frame::top(source);
        let globals = self.globals.clone();
        for node in nodes.iter().filter(|n| is_load(n, true)) {
            self.eval(node, &globals, &frame)?;
        }
        let mut found: BTreeMap<String, RoutineSignature> =
            self.signatures.iter().map(|(k, v)| (k.clone(), (**v).clone())).collect();
        let body: Vec<&Node> = nodes.iter().filter(|n| !matches!(n.kind, NodeKind::Load { .. })).collect();
        if !body.is_empty() && body.iter().all(|n| is_routine(n)) {
            found.extend(self.check_library(&nodes, source)?);
        }
        Ok(found)
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}
