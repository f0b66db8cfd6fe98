//! Step-by-step record of one enumeration.

use std::collections::HashMap;

use crate::graph::NodeId;
use crate::value::Value;

/// The arc an atom travels along: child slot `slot` of node `parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub parent: NodeId,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind<P> {
    /// `gen_atoms` was started on the node; `to` is `None` for the root.
    Invoke { to: Option<Edge> },
    Bind { value: Value },
    Unbind,
    /// An atom leaves the node. `from_env` marks atoms produced because the
    /// node was already bound.
    Yield {
        to: Option<Edge>,
        value: Value,
        prob: P,
        from_env: bool,
    },
    /// A conditional received a `false` condition atom and yields nothing
    /// for it.
    SkipFalseCondition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent<P> {
    pub step: usize,
    pub node: NodeId,
    pub kind: EventKind<P>,
}

/// An atom currently being processed by its consumer.
#[derive(Debug, Clone, PartialEq)]
pub struct LiveAtom<P> {
    pub node: NodeId,
    pub to: Option<Edge>,
    pub value: Value,
    pub prob: P,
}

/// Snapshot taken when the root yields an atom or a condition prunes a
/// branch.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<P> {
    /// 1-based row number.
    pub index: usize,
    /// Bound nodes, in creation order.
    pub bindings: Vec<(NodeId, Value)>,
    /// Live atoms, outermost first.
    pub atoms: Vec<LiveAtom<P>>,
    /// The conditional that pruned, for skip rows.
    pub skipped_at: Option<NodeId>,
}

impl<P> TraceRow<P> {
    pub fn atom_on(&self, node: NodeId, to: Option<Edge>) -> Option<&LiveAtom<P>> {
        self.atoms.iter().find(|a| a.node == node && a.to == to)
    }

    pub fn root_atom(&self) -> Option<&LiveAtom<P>> {
        self.atoms.iter().find(|a| a.to.is_none())
    }

    pub fn is_skip(&self) -> bool {
        self.skipped_at.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<P> {
    pub events: Vec<TraceEvent<P>>,
    pub rows: Vec<TraceRow<P>>,
}

impl<P> Default for Trace<P> {
    fn default() -> Self {
        Trace {
            events: Vec::new(),
            rows: Vec::new(),
        }
    }
}

impl<P: Clone> Trace<P> {
    /// Atoms yielded by the root, in order.
    pub fn root_yields(&self) -> Vec<(Value, P)> {
        self.events
            .iter()
            .filter_map(|e| match &e.kind {
                EventKind::Yield {
                    to: None,
                    value,
                    prob,
                    ..
                } => Some((value.clone(), prob.clone())),
                _ => None,
            })
            .collect()
    }

    /// Atoms sent along `edge`, in order.
    pub fn yields_on(&self, node: NodeId, edge: Option<Edge>) -> Vec<(Value, P)> {
        self.events
            .iter()
            .filter(|e| e.node == node)
            .filter_map(|e| match &e.kind {
                EventKind::Yield {
                    to, value, prob, ..
                } if *to == edge => Some((value.clone(), prob.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn skip_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, EventKind::SkipFalseCondition))
            .count()
    }

    /// Bind minus unbind events per node; all zero after a complete run.
    pub fn open_bindings(&self) -> HashMap<NodeId, i64> {
        let mut open: HashMap<NodeId, i64> = HashMap::new();
        for e in &self.events {
            match e.kind {
                EventKind::Bind { .. } => *open.entry(e.node).or_default() += 1,
                EventKind::Unbind => *open.entry(e.node).or_default() -= 1,
                _ => {}
            }
        }
        open.retain(|_, n| *n != 0);
        open
    }
}

#[derive(Debug)]
pub(crate) struct Tracer<P> {
    pub(crate) trace: Trace<P>,
    live: Vec<LiveAtom<P>>,
}

impl<P: Clone> Tracer<P> {
    pub(crate) fn new() -> Self {
        Tracer {
            trace: Trace::default(),
            live: Vec::new(),
        }
    }

    pub(crate) fn event(&mut self, node: NodeId, kind: EventKind<P>) {
        let step = self.trace.events.len();
        self.trace.events.push(TraceEvent { step, node, kind });
    }

    pub(crate) fn push_live(&mut self, atom: LiveAtom<P>) {
        self.live.push(atom);
    }

    pub(crate) fn pop_live(&mut self) {
        self.live.pop();
    }

    pub(crate) fn snapshot(&mut self, env: &HashMap<NodeId, Value>, skipped_at: Option<NodeId>) {
        let mut bindings: Vec<(NodeId, Value)> =
            env.iter().map(|(k, v)| (*k, v.clone())).collect();
        bindings.sort_by_key(|(k, _)| *k);
        let index = self.trace.rows.len() + 1;
        self.trace.rows.push(TraceRow {
            index,
            bindings,
            atoms: self.live.clone(),
            skipped_at,
        });
    }
}
