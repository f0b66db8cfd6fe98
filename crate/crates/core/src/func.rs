//! Pure deterministic functions applied by functional nodes.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::value::Value;

type Body = dyn Fn(&[Value]) -> Result<Value, String> + Send + Sync;

static NEXT_FN_ID: AtomicU64 = AtomicU64::new(1);

/// A named pure function of fixed arity.
///
/// The body receives its arguments unpacked: a unary function gets a one
/// element slice, an n-ary function gets the elements of its argument tuple.
/// Two handles are equal iff they share the same underlying function object.
#[derive(Clone)]
pub struct PureFn(Arc<Inner>);

struct Inner {
    id: u64,
    name: String,
    arity: usize,
    body: Box<Body>,
}

impl PureFn {
    pub fn new<F>(name: impl Into<String>, arity: usize, body: F) -> Self
    where
        F: Fn(&[Value]) -> Result<Value, String> + Send + Sync + 'static,
    {
        assert!(arity >= 1, "pure functions take at least one argument");
        PureFn(Arc::new(Inner {
            id: NEXT_FN_ID.fetch_add(1, AtomicOrdering::Relaxed),
            name: name.into(),
            arity,
            body: Box::new(body),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    /// Calls the body on already unpacked arguments.
    pub fn call(&self, args: &[Value]) -> Result<Value, String> {
        if args.len() != self.0.arity {
            return Err(format!(
                "expects {} argument(s), got {}",
                self.0.arity,
                args.len()
            ));
        }
        (self.0.body)(args)
    }

    /// Applies the function to the value carried by its argument node: the
    /// value itself for unary functions, a tuple of arguments otherwise.
    pub fn apply(&self, arg: &Value) -> Result<Value, String> {
        if self.0.arity == 1 {
            return self.call(std::slice::from_ref(arg));
        }
        match arg {
            Value::Tuple(items) => self.call(items),
            other => Err(format!("expects an argument tuple, got {other}")),
        }
    }
}

impl PartialEq for PureFn {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for PureFn {}

impl Hash for PureFn {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl PartialOrd for PureFn {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PureFn {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .name
            .cmp(&other.0.name)
            .then(self.0.id.cmp(&other.0.id))
    }
}

impl fmt::Debug for PureFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PureFn({}/{})", self.0.name, self.0.arity)
    }
}
