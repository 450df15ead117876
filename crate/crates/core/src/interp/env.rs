use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::value::Value;

/// Chain of immutable-binding scopes. Cloning shares the scope.
#[derive(Clone, Default)]
pub struct Env(Rc<Scope>);

#[derive(Default)]
struct Scope {
    vars: RefCell<HashMap<String, Value>>,
    parent: Option<Env>,
}

/// A name already bound in the same scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlreadyBound(pub String);

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn child(&self) -> Env {
        Env(Rc::new(Scope {
            vars: RefCell::default(),
            parent: Some(self.clone()),
        }))
    }

    pub fn define(&self, name: &str, value: Value) -> Result<(), AlreadyBound> {
        let mut vars = self.0.vars.borrow_mut();
        if vars.contains_key(name) {
            return Err(AlreadyBound(name.to_string()));
        }
        vars.insert(name.to_string(), value);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<Value> {
        let mut scope = self;
        loop {
            if let Some(v) = scope.0.vars.borrow().get(name) {
                return Some(v.clone());
            }
            scope = scope.0.parent.as_ref()?;
        }
    }

    /// Bound in this scope itself, ignoring parents.
    pub fn defines_locally(&self, name: &str) -> bool {
        self.0.vars.borrow().contains_key(name)
    }

    /// Names bound in this scope, sorted.
    pub fn local_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.0.vars.borrow().keys().cloned().collect();
        names.sort();
        names
    }
}
