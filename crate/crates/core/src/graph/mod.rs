//! Immutable p-expression DAGs.
//!
//! Nodes are built bottom-up through the constructors on [`Pex`] and are
//! never mutated afterwards, so every child is older than its parent and the
//! graph cannot contain a cycle. Sharing is by identity: passing the same
//! handle twice refers to the same random variable, while two elementary
//! nodes built from equal pmfs are independent.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::func::PureFn;
use crate::pmf::Pmf;
use crate::value::Value;
use crate::Prob;

static NEXT_NODE_ID: AtomicU64 = AtomicU64::new(1);

/// Identity of a node, unique for the lifetime of the process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u64);

impl NodeId {
    fn fresh() -> Self {
        NodeId(NEXT_NODE_ID.fetch_add(1, Ordering::Relaxed))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug)]
pub enum NodeKind {
    Elementary(Pmf<Prob>),
    /// `head ⊗ tail`; `tail` is a tuple-valued node.
    Tuple { head: Pex, tail: Pex },
    Functional { func: PureFn, arg: Pex },
    Conditional { target: Pex, evidence: Pex },
    Table { selector: Pex, branches: IndexMap<Value, Pex> },
    /// Conjunction of conditions, checked in order.
    MultiConditional { target: Pex, conditions: Vec<Pex> },
    /// `functions` has function values; each is applied to `arg`.
    MultiFunctional { functions: Pex, arg: Pex },
    Mixture(Vec<Pex>),
}

#[derive(Debug)]
pub struct Node {
    id: NodeId,
    kind: NodeKind,
}

/// Shared handle to a node.
#[derive(Clone)]
pub struct Pex(Arc<Node>);

impl PartialEq for Pex {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Pex {}

impl Hash for Pex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl fmt::Debug for Pex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pex({} {})", self.0.id, self.kind_name())
    }
}

impl Pex {
    fn new(kind: NodeKind) -> Self {
        Pex(Arc::new(Node {
            id: NodeId::fresh(),
            kind,
        }))
    }

    pub fn id(&self) -> NodeId {
        self.0.id
    }

    pub fn kind(&self) -> &NodeKind {
        &self.0.kind
    }

    /// A fresh elementary node with the condensation of `entries` as prior.
    pub fn elementary<I>(entries: I) -> Result<Pex>
    where
        I: IntoIterator<Item = (Value, Prob)>,
    {
        Ok(Self::from_pmf(Pmf::condense(entries)?))
    }

    pub fn from_pmf(pmf: Pmf<Prob>) -> Pex {
        Pex::new(NodeKind::Elementary(pmf))
    }

    /// A fresh elementary node from `(value, num, den)` triples.
    pub fn from_ratios<I>(entries: I) -> Result<Pex>
    where
        I: IntoIterator<Item = (Value, i64, i64)>,
    {
        Ok(Self::from_pmf(Pmf::from_ratios(entries)?))
    }

    /// Boolean elementary node true with probability `p`.
    pub fn bernoulli(p: Prob) -> Result<Pex> {
        let q = num_traits::One::one();
        let q: Prob = &q - &p;
        Self::elementary([(Value::Bool(true), p), (Value::Bool(false), q)])
    }

    pub fn certain(value: impl Into<Value>) -> Pex {
        Self::from_pmf(Pmf::certain(value.into()))
    }

    /// One cell of a tuple chain. `tail` must yield tuples.
    pub fn tuple_cell(head: &Pex, tail: &Pex) -> Pex {
        Pex::new(NodeKind::Tuple {
            head: head.clone(),
            tail: tail.clone(),
        })
    }

    /// Right-nested chain `x1 ⊗ (x2 ⊗ (… ⊗ <>))`. An empty slice gives the
    /// certain empty tuple.
    pub fn tuple_of(elements: &[Pex]) -> Pex {
        elements
            .iter()
            .rev()
            .fold(Pex::certain(Value::unit()), |tail, head| {
                Pex::tuple_cell(head, &tail)
            })
    }

    /// `f(args…)`. Functions of arity above one receive their arguments
    /// packed into a tuple node.
    pub fn func(f: &PureFn, args: &[Pex]) -> Result<Pex> {
        if f.arity() != args.len() {
            return Err(Error::Arity {
                name: f.name().to_string(),
                expected: f.arity(),
                got: args.len(),
            });
        }
        let arg = match args {
            [single] => single.clone(),
            many => Pex::tuple_of(many),
        };
        Ok(Pex::new(NodeKind::Functional {
            func: f.clone(),
            arg,
        }))
    }

    /// Applies a builtin by name; panics on unknown names or wrong arity.
    pub fn apply(name: &str, args: &[Pex]) -> Pex {
        Self::func(&crate::builtins::builtin(name), args)
            .unwrap_or_else(|e| panic!("{e}"))
    }

    /// `target | evidence`.
    pub fn given(target: &Pex, evidence: &Pex) -> Pex {
        Pex::new(NodeKind::Conditional {
            target: target.clone(),
            evidence: evidence.clone(),
        })
    }

    pub fn table<I>(selector: &Pex, branches: I) -> Result<Pex>
    where
        I: IntoIterator<Item = (Value, Pex)>,
    {
        let branches: IndexMap<Value, Pex> = branches.into_iter().collect();
        if branches.is_empty() {
            return Err(Error::EmptyOperands("table"));
        }
        Ok(Pex::new(NodeKind::Table {
            selector: selector.clone(),
            branches,
        }))
    }

    pub fn multi_given(target: &Pex, conditions: &[Pex]) -> Result<Pex> {
        if conditions.is_empty() {
            return Err(Error::EmptyOperands("multi-conditional"));
        }
        Ok(Pex::new(NodeKind::MultiConditional {
            target: target.clone(),
            conditions: conditions.to_vec(),
        }))
    }

    /// Applies each function value of `functions` to `args`.
    pub fn multi_func(functions: &Pex, args: &[Pex]) -> Result<Pex> {
        let arg = match args {
            [] => return Err(Error::EmptyOperands("multi-functional")),
            [single] => single.clone(),
            many => Pex::tuple_of(many),
        };
        Ok(Pex::new(NodeKind::MultiFunctional {
            functions: functions.clone(),
            arg,
        }))
    }

    pub fn mixture(alternatives: &[Pex]) -> Result<Pex> {
        if alternatives.is_empty() {
            return Err(Error::EmptyOperands("mixture"));
        }
        Ok(Pex::new(NodeKind::Mixture(alternatives.to_vec())))
    }

    pub fn is_elementary(&self) -> bool {
        matches!(self.kind(), NodeKind::Elementary(_))
    }

    pub fn pmf(&self) -> Option<&Pmf<Prob>> {
        match self.kind() {
            NodeKind::Elementary(pmf) => Some(pmf),
            _ => None,
        }
    }

    /// Elementary node with a single value.
    pub fn is_certain(&self) -> bool {
        self.pmf().is_some_and(|p| p.is_certain())
    }

    fn is_unit_terminator(&self) -> bool {
        self.pmf()
            .is_some_and(|p| p.is_certain() && p.values().all(Value::is_unit))
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind() {
            NodeKind::Elementary(_) => "elementary",
            NodeKind::Tuple { .. } => "tuple",
            NodeKind::Functional { .. } => "functional",
            NodeKind::Conditional { .. } => "conditional",
            NodeKind::Table { .. } => "table",
            NodeKind::MultiConditional { .. } => "multi-conditional",
            NodeKind::MultiFunctional { .. } => "multi-functional",
            NodeKind::Mixture(_) => "mixture",
        }
    }

    /// Direct children, in definition order.
    pub fn children(&self) -> Vec<&Pex> {
        match self.kind() {
            NodeKind::Elementary(_) => Vec::new(),
            NodeKind::Tuple { head, tail } => vec![head, tail],
            NodeKind::Functional { arg, .. } => vec![arg],
            NodeKind::Conditional { target, evidence } => vec![target, evidence],
            NodeKind::Table { selector, branches } => {
                std::iter::once(selector).chain(branches.values()).collect()
            }
            NodeKind::MultiConditional { target, conditions } => {
                std::iter::once(target).chain(conditions).collect()
            }
            NodeKind::MultiFunctional { functions, arg } => vec![functions, arg],
            NodeKind::Mixture(alts) => alts.iter().collect(),
        }
    }

    /// Longest path down to a leaf: 0 for elementary nodes, one more than
    /// the deepest child otherwise. A chain of tuple cells counts as a single
    /// n-ary tuple node, so `<a, b>` sits one level above `a` and `b` and
    /// inner cells of a chain share the level of the outermost one.
    pub fn level(&self) -> usize {
        fn go(node: &Pex, memo: &mut HashMap<NodeId, usize>) -> usize {
            if let Some(&l) = memo.get(&node.id()) {
                return l;
            }
            let l = match node.kind() {
                NodeKind::Elementary(_) => 0,
                NodeKind::Tuple { head, tail } => 1 + go(head, memo).max(elements(tail, memo)),
                _ => {
                    1 + node
                        .children()
                        .into_iter()
                        .map(|c| go(c, memo))
                        .max()
                        .unwrap_or(0)
                }
            };
            memo.insert(node.id(), l);
            l
        }
        /// Deepest element level of the rest of a chain.
        fn elements(tail: &Pex, memo: &mut HashMap<NodeId, usize>) -> usize {
            match tail.kind() {
                NodeKind::Tuple { head, tail } => go(head, memo).max(elements(tail, memo)),
                _ if tail.is_unit_terminator() => 0,
                _ => go(tail, memo),
            }
        }
        go(self, &mut HashMap::new())
    }

    /// All nodes reachable from `self` (itself included), each once, in
    /// depth-first pre-order.
    pub fn reachable(&self) -> Vec<Pex> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(node) = stack.pop() {
            if !seen.insert(node.id()) {
                continue;
            }
            for child in node.children().into_iter().rev() {
                if !seen.contains(&child.id()) {
                    stack.push(child.clone());
                }
            }
            out.push(node);
        }
        out
    }

    /// Elementary nodes reachable from `self`, deduplicated, in first-visit
    /// order.
    pub fn reachable_elementaries(&self) -> Vec<Pex> {
        self.reachable()
            .into_iter()
            .filter(Pex::is_elementary)
            .collect()
    }

    /// Number of edges entering each node of the sub-DAG rooted at `self`.
    pub fn in_degrees(&self) -> HashMap<NodeId, usize> {
        let mut deg: HashMap<NodeId, usize> = HashMap::new();
        deg.insert(self.id(), 0);
        for node in self.reachable() {
            for child in node.children() {
                *deg.entry(child.id()).or_default() += 1;
            }
        }
        deg
    }
}
