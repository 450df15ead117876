//! Tree-walking evaluator for the classical fragment, the bridge into
//! checked quantum routines, and module loading.
//!
//! A program runs in three phases: every `--qload` library is type checked
//! and its routines installed, then every `--load` library is evaluated,
//! then the remaining expressions run top to bottom.

mod builtins;
mod constraints;
mod env;
mod error;
mod eval;
mod modules;
mod value;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};
use std::path::PathBuf;
use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::qcore::MeasurementReport;
use crate::syntax::{line_col, Span};
use crate::typesys::{Globals, RoutineSignature};

pub use builtins::names as builtin_names;
pub use constraints::{check_constraints, describe, satisfies, UNITARY_TOLERANCE};
pub use env::{AlreadyBound, Env};
pub use error::{ErrorKind, RuntimeError};
pub use value::{Builtin, BuiltinImpl, Closure, Value, FLOAT_EQ_TOLERANCE};

/// Default maximum depth of nested closure calls.
pub const DEFAULT_RECURSION_LIMIT: usize = 10_000;

/// Environment variable holding extra, colon-separated library directories.
pub const PATH_VAR: &str = "QUMIN_PATH";

/// Output sink shared with the caller, for capturing what a program prints.
#[derive(Clone, Default)]
pub struct SharedBuffer(Rc<RefCell<Vec<u8>>>);

impl SharedBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.borrow()).into_owned()
    }

    pub fn clear(&self) {
        self.0.borrow_mut().clear();
    }
}

impl Write for SharedBuffer {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.borrow_mut().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

pub struct Builder {
    seed: Option<u64>,
    out: Option<Box<dyn Write>>,
    capture: Option<SharedBuffer>,
    search_path: Vec<PathBuf>,
    use_env_path: bool,
    recursion_limit: usize,
}

impl Builder {
    /// Fixes every measurement outcome. Without a seed the generator is
    /// seeded from the operating system.
    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn maybe_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn output(mut self, out: Box<dyn Write>) -> Self {
        self.out = Some(out);
        self
    }

    /// Sends output to an in-memory buffer readable via [`Interpreter::captured`].
    pub fn capture(mut self) -> Self {
        self.capture = Some(SharedBuffer::new());
        self
    }

    /// Adds a library directory, searched after the entry file's directory.
    pub fn search_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.search_path.push(dir.into());
        self
    }

    /// Whether [`PATH_VAR`] is consulted (on by default).
    pub fn env_path(mut self, on: bool) -> Self {
        self.use_env_path = on;
        self
    }

    pub fn recursion_limit(mut self, limit: usize) -> Self {
        self.recursion_limit = limit;
        self
    }

    pub fn build(self) -> Interpreter {
        let rng = match self.seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_entropy(),
        };
        let (out, capture): (Box<dyn Write>, _) = match (self.capture, self.out) {
            (Some(buf), _) => (Box::new(buf.clone()), Some(buf)),
            (None, Some(out)) => (out, None),
            (None, None) => (Box::new(io::stdout()), None),
        };
        let builtins = Env::new();
        builtins::install(&builtins);
        let globals = builtins.child();
        let quantum = builtins.child();
        let mut search_path = self.search_path;
        if self.use_env_path {
            if let Some(var) = std::env::var_os(PATH_VAR) {
                search_path.extend(std::env::split_paths(&var).filter(|p| !p.as_os_str().is_empty()));
            }
        }
        Interpreter {
            rng,
            out,
            capture,
            reports: Vec::new(),
            entry_dir: None,
            search_path,
            loaded: HashSet::new(),
            loading: Vec::new(),
            sources: Vec::new(),
            globals,
            quantum,
            routines: Globals::new(),
            signatures: BTreeMap::new(),
            depth: 0,
            recursion_limit: self.recursion_limit,
        }
    }
}

/// A loaded source text, kept for rendering diagnostics.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub text: String,
}

/// One interpreter session: global environment, loaded modules, random
/// generator and output sink.
pub struct Interpreter {
    rng: ChaCha8Rng,
    out: Box<dyn Write>,
    capture: Option<SharedBuffer>,
    reports: Vec<MeasurementReport>,
    entry_dir: Option<PathBuf>,
    search_path: Vec<PathBuf>,
    loaded: HashSet<PathBuf>,
    loading: Vec<String>,
    sources: Vec<Source>,
    globals: Env,
    quantum: Env,
    routines: Globals,
    signatures: BTreeMap<String, Rc<RoutineSignature>>,
    depth: usize,
    recursion_limit: usize,
}

impl Default for Interpreter {
    fn default() -> Self {
        Interpreter::builder().build()
    }
}

impl Interpreter {
    pub fn builder() -> Builder {
        Builder {
            seed: None,
            out: None,
            capture: None,
            search_path: Vec::new(),
            use_env_path: true,
            recursion_limit: DEFAULT_RECURSION_LIMIT,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Every measurement report produced so far, in order.
    pub fn reports(&self) -> &[MeasurementReport] {
        &self.reports
    }

    pub fn take_reports(&mut self) -> Vec<MeasurementReport> {
        std::mem::take(&mut self.reports)
    }

    /// Text written so far when built with [`Builder::capture`].
    pub fn captured(&self) -> Option<String> {
        self.capture.as_ref().map(SharedBuffer::contents)
    }

    /// Signatures of every routine installed so far.
    pub fn signatures(&self) -> impl Iterator<Item = &RoutineSignature> {
        self.signatures.values().map(|s| &**s)
    }

    pub fn global(&self, name: &str) -> Option<Value> {
        self.globals.lookup(name)
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub(crate) fn emit_report(&mut self, report: MeasurementReport, span: Span) -> Result<(), RuntimeError> {
        let text = report.to_string();
        self.reports.push(report);
        self.write_str(&text, span)
    }

    pub(crate) fn write_line(&mut self, text: &str, span: Span) -> Result<(), RuntimeError> {
        self.write_str(&format!("{text}\n"), span)
    }

    fn write_str(&mut self, text: &str, span: Span) -> Result<(), RuntimeError> {
        self.out
            .write_all(text.as_bytes())
            .and_then(|_| self.out.flush())
            .map_err(|e| {
                RuntimeError::at(
                    ErrorKind::Io {
                        path: "<output>".into(),
                        message: e.to_string(),
                    },
                    span,
                )
            })
    }

    pub(crate) fn add_source(&mut self, name: &str, text: &str) -> usize {
        self.sources.push(Source {
            name: name.to_string(),
            text: text.to_string(),
        });
        self.sources.len() - 1
    }

    /// `file:line:col: error: message`, or a shorter form when the error
    /// has no location.
    pub fn render_error(&self, err: &RuntimeError) -> String {
        let source = err.source.and_then(|i| self.sources.get(i));
        match (source, err.span) {
            (Some(src), Some(span)) => {
                let (line, col) = line_col(&src.text, span.start);
                format!("{}:{line}:{col}: error: {err}", src.name)
            }
            (Some(src), None) => format!("{}: error: {err}", src.name),
            _ => format!("error: {err}"),
        }
    }
}
