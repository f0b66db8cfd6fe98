//! Lazy, binding-aware enumeration of atoms.
//!
//! Enumeration is written in continuation-passing style: a producer calls
//! the consumer once per atom and the consumer may itself start nested
//! enumerations on the same [`Enumerator`]. A node is bound to an atom's
//! value for exactly as long as the consumer of that atom runs, so any
//! nested visit of the same node sees the bound value with probability one.

mod trace;

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

pub use trace::{Edge, EventKind, LiveAtom, Trace, TraceEvent, TraceRow};
use trace::Tracer;

use crate::error::{Error, Result};
use crate::func::PureFn;
use crate::graph::{NodeId, NodeKind, Pex};
use crate::pmf::Pmf;
use crate::scalar::Probability;
use crate::value::Value;
use crate::Prob;

/// Receives one atom `(value, weight)`.
pub type Consumer<'c, P> = dyn FnMut(&mut Enumerator<P>, &Value, &P) -> Result<()> + 'c;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Skip bind/unbind for nodes entered through a single edge of the
    /// query DAG and for certain nodes. Results are unchanged.
    pub skip_binding: bool,
    /// Cache function results per (node, argument) for the whole query.
    pub memoize: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            skip_binding: false,
            memoize: true,
        }
    }
}

/// Counters collected during one query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub gen_atoms_calls: HashMap<NodeId, usize>,
    pub fn_evals_by_name: HashMap<String, usize>,
    pub fn_evals_by_node: HashMap<NodeId, usize>,
    pub memo_hits: usize,
    pub binds: usize,
    pub unbinds: usize,
}

impl QueryStats {
    pub fn calls(&self, node: &Pex) -> usize {
        self.gen_atoms_calls.get(&node.id()).copied().unwrap_or(0)
    }

    pub fn evals(&self, name: &str) -> usize {
        self.fn_evals_by_name.get(name).copied().unwrap_or(0)
    }
}

/// State of one query: the binding environment, the function cache, counters
/// and an optional tracer.
pub struct Enumerator<P = Prob> {
    env: HashMap<NodeId, Value>,
    options: Options,
    skip: HashSet<NodeId>,
    memo: HashMap<(NodeId, Value), Value>,
    stats: QueryStats,
    tracer: Option<Tracer<P>>,
}

impl<P: Probability> Default for Enumerator<P> {
    fn default() -> Self {
        Self::new(Options::default())
    }
}

impl<P: Probability> Enumerator<P> {
    pub fn new(options: Options) -> Self {
        Enumerator {
            env: HashMap::new(),
            options,
            skip: HashSet::new(),
            memo: HashMap::new(),
            stats: QueryStats::default(),
            tracer: None,
        }
    }

    /// Records every step from now on.
    pub fn traced(mut self) -> Self {
        self.tracer = Some(Tracer::new());
        self
    }

    pub fn stats(&self) -> &QueryStats {
        &self.stats
    }

    pub fn take_trace(&mut self) -> Option<Trace<P>> {
        self.tracer.take().map(|t| t.trace)
    }

    pub fn bound_value(&self, node: &Pex) -> Option<&Value> {
        self.env.get(&node.id())
    }

    pub fn env_len(&self) -> usize {
        self.env.len()
    }

    /// Binds an elementary node before enumeration starts.
    pub fn observe(&mut self, node: &Pex, value: Value) -> Result<()> {
        let pmf = node.pmf().ok_or(Error::NotElementary(node.id()))?;
        if !pmf.contains(&value) {
            return Err(Error::UnknownObservationValue {
                node: node.id(),
                value,
            });
        }
        match self.env.get(&node.id()) {
            Some(existing) if *existing != value => Err(Error::EmptyDistribution),
            _ => {
                self.env.insert(node.id(), value);
                Ok(())
            }
        }
    }

    pub fn clear_observations(&mut self) {
        self.env.clear();
    }

    /// Computes the skip-binding set for `root` when that option is on.
    fn prepare(&mut self, root: &Pex) {
        self.skip.clear();
        if !self.options.skip_binding {
            return;
        }
        let degrees = root.in_degrees();
        for node in root.reachable() {
            if degrees[&node.id()] <= 1 || node.is_certain() {
                self.skip.insert(node.id());
            }
        }
    }

    /// The normalized distribution of `root` under the current bindings.
    pub fn marg(&mut self, root: &Pex) -> Result<Pmf<P>> {
        let mut acc: IndexMap<Value, P> = IndexMap::new();
        self.prepare(root);
        self.gen_atoms(root, &mut |_, v, p| {
            match acc.get_mut(v) {
                Some(w) => *w = w.clone() + p.clone(),
                None => {
                    acc.insert(v.clone(), p.clone());
                }
            }
            Ok(())
        })?;
        acc.retain(|_, w| !w.is_zero());
        if acc.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        Ok(Pmf::normalized(acc))
    }

    /// Raw atoms yielded by `root`, before condensation.
    pub fn root_atoms(&mut self, root: &Pex) -> Result<Vec<(Value, P)>> {
        let mut atoms = Vec::new();
        self.prepare(root);
        self.gen_atoms(root, &mut |_, v, p| {
            atoms.push((v.clone(), p.clone()));
            Ok(())
        })?;
        Ok(atoms)
    }

    /// Streams the atoms of `d`, binding `d` to each value while its consumer
    /// runs. A bound node yields its value once with weight one.
    pub fn gen_atoms(&mut self, d: &Pex, k: &mut Consumer<'_, P>) -> Result<()> {
        self.atoms(d, None, k)
    }

    /// Streams the atoms of `d` according to its kind, without binding `d`.
    pub fn gen_atoms_by_type(&mut self, d: &Pex, k: &mut Consumer<'_, P>) -> Result<()> {
        self.by_type(d, k)
    }

    fn atoms(&mut self, d: &Pex, via: Option<Edge>, k: &mut Consumer<'_, P>) -> Result<()> {
        *self.stats.gen_atoms_calls.entry(d.id()).or_default() += 1;
        if let Some(t) = &mut self.tracer {
            t.event(d.id(), EventKind::Invoke { to: via });
        }
        if let Some(v) = self.env.get(&d.id()).cloned() {
            return self.emit(d, via, &v, &P::one(), true, k);
        }
        if self.skip.contains(&d.id()) {
            return self.by_type(d, &mut |en, v, p| en.emit(d, via, v, p, false, k));
        }
        self.by_type(d, &mut |en, v, p| {
            en.bind(d, v);
            let r = en.emit(d, via, v, p, false, k);
            en.unbind(d);
            r
        })
    }

    fn bind(&mut self, d: &Pex, v: &Value) {
        self.stats.binds += 1;
        self.env.insert(d.id(), v.clone());
        if let Some(t) = &mut self.tracer {
            t.event(d.id(), EventKind::Bind { value: v.clone() });
        }
    }

    fn unbind(&mut self, d: &Pex) {
        self.stats.unbinds += 1;
        self.env.remove(&d.id());
        if let Some(t) = &mut self.tracer {
            t.event(d.id(), EventKind::Unbind);
        }
    }

    fn emit(
        &mut self,
        d: &Pex,
        via: Option<Edge>,
        v: &Value,
        p: &P,
        from_env: bool,
        k: &mut Consumer<'_, P>,
    ) -> Result<()> {
        if let Some(t) = &mut self.tracer {
            t.event(
                d.id(),
                EventKind::Yield {
                    to: via,
                    value: v.clone(),
                    prob: p.clone(),
                    from_env,
                },
            );
            t.push_live(LiveAtom {
                node: d.id(),
                to: via,
                value: v.clone(),
                prob: p.clone(),
            });
            if via.is_none() {
                t.snapshot(&self.env, None);
            }
        }
        let r = k(self, v, p);
        if let Some(t) = &mut self.tracer {
            t.pop_live();
        }
        r
    }

    fn skip_false(&mut self, d: &Pex) {
        if let Some(t) = &mut self.tracer {
            t.event(d.id(), EventKind::SkipFalseCondition);
            t.snapshot(&self.env, Some(d.id()));
        }
    }

    fn apply_fn(&mut self, node: NodeId, f: &PureFn, key: Value, arg: &Value) -> Result<Value> {
        if self.options.memoize {
            if let Some(v) = self.memo.get(&(node, key.clone())) {
                self.stats.memo_hits += 1;
                return Ok(v.clone());
            }
        }
        *self
            .stats
            .fn_evals_by_name
            .entry(f.name().to_string())
            .or_default() += 1;
        *self.stats.fn_evals_by_node.entry(node).or_default() += 1;
        let out = f.apply(arg).map_err(|message| Error::Function {
            name: f.name().to_string(),
            message,
        })?;
        if self.options.memoize {
            self.memo.insert((node, key), out.clone());
        }
        Ok(out)
    }

    fn by_type(&mut self, d: &Pex, k: &mut Consumer<'_, P>) -> Result<()> {
        let id = d.id();
        let edge = |slot| Some(Edge { parent: id, slot });
        match d.kind() {
            NodeKind::Elementary(pmf) => {
                for (v, p) in pmf.iter() {
                    k(self, v, &P::from_ratio(p))?;
                }
                Ok(())
            }
            NodeKind::Functional { func, arg } => self.atoms(arg, edge(0), &mut |en, v, p| {
                let out = en.apply_fn(id, func, v.clone(), v)?;
                k(en, &out, p)
            }),
            NodeKind::Tuple { head, tail } => self.atoms(head, edge(0), &mut |en, v, p| {
                en.atoms(tail, edge(1), &mut |en, s, q| {
                    let t = Value::cons(v.clone(), s).ok_or_else(|| Error::NotATuple {
                        node: id,
                        value: s.clone(),
                    })?;
                    k(en, &t, &(p.clone() * q.clone()))
                })
            }),
            NodeKind::Conditional { target, evidence } => {
                self.atoms(evidence, edge(1), &mut |en, v, p| match v {
                    Value::Bool(true) => en.atoms(target, edge(0), &mut |en, s, q| {
                        k(en, s, &(p.clone() * q.clone()))
                    }),
                    Value::Bool(false) => {
                        en.skip_false(d);
                        Ok(())
                    }
                    other => Err(Error::NonBooleanCondition {
                        node: id,
                        value: other.clone(),
                    }),
                })
            }
            NodeKind::Table { selector, branches } => {
                self.atoms(selector, edge(0), &mut |en, v, p| {
                    let (i, _, branch) =
                        branches
                            .get_full(v)
                            .ok_or_else(|| Error::MissingTableEntry {
                                node: id,
                                key: v.clone(),
                            })?;
                    en.atoms(branch, edge(1 + i), &mut |en, s, q| {
                        k(en, s, &(p.clone() * q.clone()))
                    })
                })
            }
            NodeKind::MultiConditional { target, conditions } => {
                self.conjunction(d, target, conditions, 0, P::one(), k)
            }
            NodeKind::MultiFunctional { functions, arg } => {
                self.atoms(functions, edge(0), &mut |en, f, p| {
                    let func = f
                        .as_func()
                        .ok_or_else(|| Error::NonFunctionValue(f.clone()))?
                        .clone();
                    en.atoms(arg, edge(1), &mut |en, v, q| {
                        let key = Value::tuple([f.clone(), v.clone()]);
                        let out = en.apply_fn(id, &func, key, v)?;
                        k(en, &out, &(p.clone() * q.clone()))
                    })
                })
            }
            NodeKind::Mixture(alternatives) => {
                for (i, alt) in alternatives.iter().enumerate() {
                    self.atoms(alt, edge(i), &mut |en, v, p| k(en, v, p))?;
                }
                Ok(())
            }
        }
    }

    /// Conditions `i..` of a multi-conditional, then its target; `acc` is
    /// the weight of the condition atoms accepted so far.
    fn conjunction(
        &mut self,
        d: &Pex,
        target: &Pex,
        conditions: &[Pex],
        i: usize,
        acc: P,
        k: &mut Consumer<'_, P>,
    ) -> Result<()> {
        let id = d.id();
        let Some(cond) = conditions.get(i) else {
            return self.atoms(target, Some(Edge { parent: id, slot: 0 }), &mut |en, s, q| {
                k(en, s, &(acc.clone() * q.clone()))
            });
        };
        self.atoms(cond, Some(Edge { parent: id, slot: 1 + i }), &mut |en, v, p| match v {
            Value::Bool(true) => en.conjunction(d, target, conditions, i + 1, acc.clone() * p.clone(), k),
            Value::Bool(false) => {
                en.skip_false(d);
                Ok(())
            }
            other => Err(Error::NonBooleanCondition {
                node: id,
                value: other.clone(),
            }),
        })
    }
}

/// Exact distribution of `root`.
pub fn marg(root: &Pex) -> Result<Pmf<Prob>> {
    marg_with(root, Options::default())
}

/// Distribution of `root` accumulated in the scalar `P`.
pub fn marg_with<P: Probability>(root: &Pex, options: Options) -> Result<Pmf<P>> {
    Enumerator::new(options).marg(root)
}

/// Distribution of `root` with the given elementary nodes fixed to the given
/// values. Equivalent to conditioning on the conjunction of the equalities.
pub fn marg_with_observations(root: &Pex, observations: &[(Pex, Value)]) -> Result<Pmf<Prob>> {
    let mut en = Enumerator::<Prob>::default();
    for (node, value) in observations {
        en.observe(node, value.clone())?;
    }
    let out = en.marg(root);
    en.clear_observations();
    out
}

/// Exact distribution of `root` together with the full step record. The
/// trace covers everything up to the error, if any.
pub fn marg_traced(root: &Pex) -> (Result<Pmf<Prob>>, Trace<Prob>) {
    marg_traced_with(root, Options::default())
}

pub fn marg_traced_with(root: &Pex, options: Options) -> (Result<Pmf<Prob>>, Trace<Prob>) {
    let mut en = Enumerator::<Prob>::new(options).traced();
    let out = en.marg(root);
    (out, en.take_trace().unwrap_or_default())
}

/// Exact distribution of `root` and the counters of the run.
pub fn marg_instrumented(root: &Pex, options: Options) -> (Result<Pmf<Prob>>, QueryStats) {
    let mut en = Enumerator::<Prob>::new(options);
    let out = en.marg(root);
    (out, en.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    fn q(n: i64, d: i64) -> Prob {
        Prob::new(n.into(), d.into())
    }

    fn b1() -> Pex {
        Pex::from_ratios([(Value::int(0), 1, 3), (Value::int(1), 2, 3)]).unwrap()
    }

    fn b2() -> Pex {
        Pex::from_ratios([(Value::int(0), 3, 4), (Value::int(1), 1, 4)]).unwrap()
    }

    #[test]
    fn example_sums() {
        let (b1, b2) = (b1(), b2());
        let s = Pex::apply("add", &[b1.clone(), b2.clone()]);
        assert_eq!(marg(&s).unwrap().to_string(), "{0: 1/4, 1: 7/12, 2: 1/6}");
        let r = Pex::apply("add", &[b1.clone(), b1.clone()]);
        assert_eq!(marg(&r).unwrap().to_string(), "{0: 1/3, 2: 2/3}");
        let cond = Pex::apply("le", &[s, Pex::certain(1)]);
        let qn = Pex::given(&b1, &cond);
        assert_eq!(marg(&qn).unwrap().to_string(), "{0: 2/5, 1: 3/5}");
    }

    #[test]
    fn bound_node_yields_once_with_weight_one() {
        let b = b1();
        let mut en = Enumerator::<Prob>::default();
        en.observe(&b, Value::int(1)).unwrap();
        let atoms = en.root_atoms(&b).unwrap();
        assert_eq!(atoms, vec![(Value::int(1), q(1, 1))]);
    }

    #[test]
    fn unbound_elementary_yields_pmf_order() {
        let atoms = Enumerator::<Prob>::default().root_atoms(&b1()).unwrap();
        assert_eq!(atoms, vec![(Value::int(0), q(1, 3)), (Value::int(1), q(2, 3))]);
        let six = Enumerator::<Prob>::default().root_atoms(&Pex::certain(6)).unwrap();
        assert_eq!(six, vec![(Value::int(6), q(1, 1))]);
    }

    #[test]
    fn tuple_atoms_in_nested_loop_order() {
        let t = Pex::tuple_of(&[b1(), b2()]);
        let atoms = Enumerator::<Prob>::default().root_atoms(&t).unwrap();
        let pair = |a, b| Value::tuple([Value::int(a), Value::int(b)]);
        assert_eq!(
            atoms,
            vec![
                (pair(0, 0), q(1, 4)),
                (pair(0, 1), q(1, 12)),
                (pair(1, 0), q(1, 2)),
                (pair(1, 1), q(1, 6)),
            ]
        );
    }

    #[test]
    fn env_is_empty_after_success_and_error() {
        let b = b1();
        let mut en = Enumerator::<Prob>::default();
        let root = Pex::tuple_of(&[b.clone(), Pex::apply("div", &[Pex::certain(1), b.clone()])]);
        assert!(matches!(en.marg(&root), Err(Error::Function { .. })));
        assert_eq!(en.env_len(), 0);
        assert_eq!(en.stats().binds, en.stats().unbinds);
        let ok = Pex::tuple_of(&[b.clone(), b]);
        en.marg(&ok).unwrap();
        assert_eq!(en.env_len(), 0);
    }

    #[test]
    fn conditions_must_be_boolean() {
        let b = b1();
        assert!(matches!(
            marg(&Pex::given(&b, &b)),
            Err(Error::NonBooleanCondition { .. })
        ));
        assert!(matches!(
            marg(&Pex::given(&b, &Pex::certain(false))),
            Err(Error::EmptyDistribution)
        ));
    }

    #[test]
    fn missing_table_entry_is_lazy() {
        let b = b1();
        let sel = Pex::given(&b, &Pex::apply("eq", &[b.clone(), Pex::certain(0)]));
        let t = Pex::table(&sel, [(Value::int(0), Pex::certain("zero"))]).unwrap();
        assert_eq!(marg(&t).unwrap().to_string(), "{zero: 1/1}");
        let t = Pex::table(&b, [(Value::int(0), Pex::certain("zero"))]).unwrap();
        assert!(matches!(marg(&t), Err(Error::MissingTableEntry { .. })));
    }

    #[test]
    fn observations_validate_and_clear() {
        let b = b1();
        let s = Pex::apply("add", &[b.clone(), b2()]);
        assert!(matches!(
            marg_with_observations(&s, &[(s.clone(), Value::int(0))]),
            Err(Error::NotElementary(_))
        ));
        assert!(matches!(
            marg_with_observations(&s, &[(b.clone(), Value::int(7))]),
            Err(Error::UnknownObservationValue { .. })
        ));
        assert!(matches!(
            marg_with_observations(&s, &[(b.clone(), Value::int(0)), (b.clone(), Value::int(1))]),
            Err(Error::EmptyDistribution)
        ));
        let pmf = marg_with_observations(&s, &[(b, Value::int(1))]).unwrap();
        assert_eq!(pmf.to_string(), "{1: 3/4, 2: 1/4}");
    }

    #[test]
    fn float_scalars_agree_with_exact() {
        let s = Pex::apply("add", &[b1(), b2()]);
        let f: Pmf<f64> = marg_with(&s, Options::default()).unwrap();
        assert!((f.prob_of(&Value::int(1)) - 7.0 / 12.0).abs() < 1e-15);
        let g: Pmf<f32> = marg_with(&s, Options::default()).unwrap();
        assert!((g.prob_of(&Value::int(2)) - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn skip_binding_gives_identical_results() {
        let (b1, b2) = (b1(), b2());
        let s = Pex::apply("add", &[b1.clone(), b2.clone()]);
        let root = Pex::given(&Pex::tuple_of(&[b1.clone(), s.clone()]), &Pex::apply("le", &[s, Pex::certain(1)]));
        let skip = Options { skip_binding: true, ..Options::default() };
        let (plain, ps) = marg_instrumented(&root, Options::default());
        let (fast, fs) = marg_instrumented(&root, skip);
        assert_eq!(plain.unwrap(), fast.unwrap());
        assert!(fs.binds < ps.binds);
    }

    #[test]
    fn trace_records_rows_and_skips() {
        let (b1, b2) = (b1(), b2());
        let s = Pex::apply("add", &[b1.clone(), b2]);
        let root = Pex::given(&b1, &Pex::apply("le", &[s, Pex::certain(1)]));
        let (pmf, trace) = marg_traced(&root);
        assert_eq!(pmf.unwrap().to_string(), "{0: 2/5, 1: 3/5}");
        assert_eq!(trace.rows.len(), 4);
        assert!(trace.rows[3].is_skip());
        assert_eq!(trace.skip_count(), 1);
        assert!(trace.open_bindings().is_empty());
        assert_eq!(
            trace.root_yields(),
            vec![(Value::int(0), q(1, 4)), (Value::int(0), q(1, 12)), (Value::int(1), q(1, 2))]
        );
    }
}
