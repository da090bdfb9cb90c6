//! Function registry: built-in library plus host-registered functions.

mod builtins;
pub mod dist;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{is_identifier, KEYWORDS};
use crate::rng::RandomStream;
use crate::value::Value;

pub use builtins::{args, fill_rect, implant, kmer_counts};

/// Failure inside a function body: bad argument kinds or values outside
/// the function's domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct FnError(pub String);

impl FnError {
    pub fn new(message: impl Into<String>) -> Self {
        FnError(message.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("function {0} is already registered")]
    NameCollision(String),
    #[error("{0:?} is not a valid function name")]
    InvalidName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exact(usize),
    /// `min..=max` arguments; `None` means unbounded.
    Range { min: usize, max: Option<usize> },
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exact(k) => n == k,
            Arity::Range { min, max } => n >= min && max.is_none_or(|m| n <= m),
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Exact(k) => write!(f, "{k}"),
            Arity::Range { min, max: Some(max) } => write!(f, "{min} to {max}"),
            Arity::Range { min, max: None } => write!(f, "at least {min}"),
        }
    }
}

pub type PureFn = dyn Fn(&[Value]) -> Result<Value, FnError> + Send + Sync;
pub type StochasticFn = dyn Fn(&[Value], &mut RandomStream) -> Result<Value, FnError> + Send + Sync;

#[derive(Clone)]
pub enum FunctionImpl {
    Pure(Arc<PureFn>),
    /// Receives the calling node's random stream.
    Stochastic(Arc<StochasticFn>),
}

impl FunctionImpl {
    pub fn pure<F>(f: F) -> Self
    where
        F: Fn(&[Value]) -> Result<Value, FnError> + Send + Sync + 'static,
    {
        FunctionImpl::Pure(Arc::new(f))
    }

    pub fn stochastic<F>(f: F) -> Self
    where
        F: Fn(&[Value], &mut RandomStream) -> Result<Value, FnError> + Send + Sync + 'static,
    {
        FunctionImpl::Stochastic(Arc::new(f))
    }
}

#[derive(Clone)]
pub struct FunctionEntry {
    pub arity: Arity,
    pub builtin: bool,
    pub imp: FunctionImpl,
}

impl FunctionEntry {
    pub fn is_stochastic(&self) -> bool {
        matches!(self.imp, FunctionImpl::Stochastic(_))
    }
}

impl fmt::Debug for FunctionEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionEntry")
            .field("arity", &self.arity)
            .field("builtin", &self.builtin)
            .field("stochastic", &self.is_stochastic())
            .finish()
    }
}

/// Name → function table consulted by validation and evaluation.
#[derive(Clone, Debug)]
pub struct FunctionRegistry {
    entries: BTreeMap<String, FunctionEntry>,
}

impl Default for FunctionRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl FunctionRegistry {
    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        builtins::install(&mut registry);
        registry
    }

    /// A table with no functions at all.
    pub fn empty() -> Self {
        FunctionRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub(crate) fn insert_builtin(&mut self, name: &str, arity: Arity, imp: FunctionImpl) {
        let previous = self.entries.insert(
            name.to_string(),
            FunctionEntry {
                arity,
                builtin: true,
                imp,
            },
        );
        debug_assert!(previous.is_none(), "duplicate builtin {name}");
    }

    /// Add a host function. Built-ins cannot be shadowed and a name can be
    /// registered only once.
    pub fn register_host_function(
        &mut self,
        name: &str,
        arity: Arity,
        imp: FunctionImpl,
    ) -> Result<(), RegistryError> {
        if !is_identifier(name) || KEYWORDS.contains(&name) {
            return Err(RegistryError::InvalidName(name.to_string()));
        }
        if self.entries.contains_key(name) {
            return Err(RegistryError::NameCollision(name.to_string()));
        }
        self.entries.insert(
            name.to_string(),
            FunctionEntry {
                arity,
                builtin: false,
                imp,
            },
        );
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&FunctionEntry> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn call(&self, name: &str, args: &[Value], rng: &mut RandomStream) -> Result<Value, FnError> {
        let entry = self
            .entries
            .get(name)
            .ok_or_else(|| FnError::new("unknown function"))?;
        if !entry.arity.accepts(args.len()) {
            return Err(FnError::new(format!(
                "expects {} argument(s), got {}",
                entry.arity,
                args.len()
            )));
        }
        match &entry.imp {
            FunctionImpl::Pure(f) => f(args),
            FunctionImpl::Stochastic(f) => f(args, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval, parse, Bindings, EvalEnv};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn complement_binomial() -> FunctionImpl {
        FunctionImpl::stochastic(|args, rng| {
            let p = args::float(args, 0)?;
            dist::binomial(rng, 1, 1.0 - p).map(Value::Int)
        })
    }

    #[test]
    fn host_function_is_callable_from_expressions() {
        let mut registry = FunctionRegistry::with_builtins();
        registry
            .register_host_function("complement_binomial", Arity::Exact(1), complement_binomial())
            .unwrap();
        let e = parse("complement_binomial(1.0)").unwrap();
        let bindings = Bindings::new();
        for i in 0..20 {
            let mut rng = RandomStream::from_seed(0, "V", i);
            let v = eval(&e, &mut EvalEnv::new(&bindings, &mut rng, &registry)).unwrap();
            assert!(matches!(v, Value::Int(0)));
        }
        assert!(registry.get("complement_binomial").unwrap().is_stochastic());
    }

    #[test]
    fn builtins_cannot_be_shadowed() {
        let mut registry = FunctionRegistry::with_builtins();
        let err = registry
            .register_host_function("uniform", Arity::Exact(2), complement_binomial())
            .unwrap_err();
        assert_eq!(err, RegistryError::NameCollision("uniform".into()));
        registry
            .register_host_function("mine", Arity::Exact(1), complement_binomial())
            .unwrap();
        assert!(registry
            .register_host_function("mine", Arity::Exact(1), complement_binomial())
            .is_err());
        for bad in ["1abc", "has space", "", "if"] {
            assert_eq!(
                registry
                    .register_host_function(bad, Arity::Exact(0), complement_binomial())
                    .unwrap_err(),
                RegistryError::InvalidName(bad.into())
            );
        }
    }

    #[test]
    fn pure_host_function_runs_once_per_evaluation() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let mut registry = FunctionRegistry::with_builtins();
        registry
            .register_host_function(
                "double",
                Arity::Exact(1),
                FunctionImpl::pure(move |args| {
                    counter.fetch_add(1, Ordering::SeqCst);
                    Ok(Value::Float(2.0 * args::float(args, 0)?))
                }),
            )
            .unwrap();
        let e = parse("double(X) + 1").unwrap();
        let bindings: Bindings = [("X".to_string(), Value::Int(3))].into_iter().collect();
        let mut rng = RandomStream::from_seed(0, "Y", 0);
        let v = eval(&e, &mut EvalEnv::new(&bindings, &mut rng, &registry)).unwrap();
        assert!(matches!(v, Value::Float(x) if x == 7.0));
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        assert_eq!(rng.draw_counter(), 0);
    }

    #[test]
    fn arity_is_enforced_at_call_time() {
        let registry = FunctionRegistry::with_builtins();
        let mut rng = RandomStream::from_seed(0, "x", 0);
        let err = registry.call("uniform", &[Value::Int(0)], &mut rng).unwrap_err();
        assert!(err.0.contains("expects 2"));
        assert!(Arity::Range { min: 1, max: None }.accepts(9));
        assert!(!Arity::Range { min: 1, max: Some(2) }.accepts(3));
    }
}
