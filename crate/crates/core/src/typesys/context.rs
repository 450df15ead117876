use crate::syntax::Span;

use super::types::LinearType;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Lives in Γ: any number of uses.
    Unrestricted,
    /// Lives in Δ: must be used exactly once before its scope closes.
    Linear { uses: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub name: String,
    pub ty: LinearType,
    pub mode: Mode,
    pub span: Span,
}

/// Γ and Δ kept as one ordered stack so that scopes nest naturally.
///
/// Checking threads a context through every sub-term: a linear variable
/// is consumed by incrementing its use count, and whatever a premise did
/// not consume is what the next premise sees.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypingContext {
    bindings: Vec<Binding>,
}

/// A linear binding that was not used exactly once.
#[derive(Clone, Debug, PartialEq)]
pub struct UnconsumedBinding {
    pub name: String,
    pub used: u32,
    pub span: Span,
}

/// Scope marker returned by [`TypingContext::mark`].
#[derive(Clone, Copy, Debug)]
pub struct Mark(usize);

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds a name in Γ if its type is unrestricted, otherwise in Δ.
    pub fn bind(&mut self, name: &str, ty: LinearType, span: Span) {
        let mode = if ty.is_unrestricted() {
            Mode::Unrestricted
        } else {
            Mode::Linear { uses: 0 }
        };
        self.bindings.push(Binding {
            name: name.to_string(),
            ty,
            mode,
            span,
        });
    }

    pub fn bind_unrestricted(&mut self, name: &str, ty: LinearType, span: Span) {
        self.bindings.push(Binding {
            name: name.to_string(),
            ty,
            mode: Mode::Unrestricted,
            span,
        });
    }

    pub fn bind_linear(&mut self, name: &str, ty: LinearType, span: Span) {
        self.bindings.push(Binding {
            name: name.to_string(),
            ty,
            mode: Mode::Linear { uses: 0 },
            span,
        });
    }

    /// Looks a name up, innermost first, recording one use.
    pub fn use_var(&mut self, name: &str) -> Option<&Binding> {
        let b = self.bindings.iter_mut().rev().find(|b| b.name == name)?;
        if let Mode::Linear { uses } = &mut b.mode {
            *uses += 1;
        }
        Some(b)
    }

    pub fn lookup(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().rev().find(|b| b.name == name)
    }

    pub fn mark(&self) -> Mark {
        Mark(self.bindings.len())
    }

    /// Closes a scope, reporting the first linear binding not used exactly once.
    pub fn pop_to(&mut self, mark: Mark) -> Result<Vec<Binding>, UnconsumedBinding> {
        let popped = self.bindings.split_off(mark.0);
        for b in &popped {
            if let Mode::Linear { uses } = b.mode {
                if uses != 1 {
                    return Err(UnconsumedBinding {
                        name: b.name.clone(),
                        used: uses,
                        span: b.span,
                    });
                }
            }
        }
        Ok(popped)
    }

    /// Total linear uses so far; the difference across a sub-check tells
    /// whether it consumed anything from Δ.
    pub fn linear_uses(&self) -> u32 {
        self.bindings
            .iter()
            .map(|b| match b.mode {
                Mode::Linear { uses } => uses,
                Mode::Unrestricted => 0,
            })
            .sum()
    }

    fn visible(&self) -> impl Iterator<Item = &Binding> {
        self.bindings
            .iter()
            .enumerate()
            .filter(|(i, b)| !self.bindings[i + 1..].iter().any(|later| later.name == b.name))
            .map(|(_, b)| b)
    }

    /// Γ: visible unrestricted bindings.
    pub fn gamma(&self) -> Vec<(&str, &LinearType)> {
        self.visible()
            .filter(|b| b.mode == Mode::Unrestricted)
            .map(|b| (b.name.as_str(), &b.ty))
            .collect()
    }

    /// Δ: visible linear bindings with their use counts.
    pub fn delta(&self) -> Vec<(&str, &LinearType, u32)> {
        self.visible()
            .filter_map(|b| match b.mode {
                Mode::Linear { uses } => Some((b.name.as_str(), &b.ty, uses)),
                Mode::Unrestricted => None,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }
}
