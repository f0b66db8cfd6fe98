//! Brute-force marginalization over possible worlds.
//!
//! A world fixes one value for every reachable elementary node and one
//! alternative index for every reachable mixture. The root is evaluated as a
//! plain deterministic expression in each world and world weights are summed
//! per result. Nothing here is shared with [`crate::engine`].
//!
//! Within a world, children are evaluated in the same order as the engine
//! visits them (conditions before targets, selector before the chosen branch,
//! head before tail), and a false condition discards the world on the spot.
//! A mixture index has weight one. Worlds in which a mixture is never
//! consulted are counted once, for index 0 only.

use std::collections::HashMap;

use indexmap::IndexMap;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeKind, Pex};
use crate::pmf::Pmf;
use crate::value::Value;
use crate::Prob;

pub const DEFAULT_CAP: u128 = 10_000_000;

/// One latent variable of the world space.
enum Axis<'a> {
    Elementary {
        id: NodeId,
        choices: Vec<(&'a Value, &'a Prob)>,
    },
    Mixture {
        id: NodeId,
        arity: usize,
    },
}

impl Axis<'_> {
    fn len(&self) -> usize {
        match self {
            Axis::Elementary { choices, .. } => choices.len(),
            Axis::Mixture { arity, .. } => *arity,
        }
    }
}

struct World<'a> {
    values: HashMap<NodeId, &'a Value>,
    mixtures: HashMap<NodeId, usize>,
    consulted: Vec<NodeId>,
    cache: HashMap<NodeId, Option<Value>>,
}

impl World<'_> {
    /// `Ok(None)` when a condition on the evaluation path is false.
    fn eval(&mut self, node: &Pex) -> Result<Option<Value>> {
        if let Some(v) = self.cache.get(&node.id()) {
            return Ok(v.clone());
        }
        let out = self.eval_uncached(node)?;
        self.cache.insert(node.id(), out.clone());
        Ok(out)
    }

    fn eval_uncached(&mut self, node: &Pex) -> Result<Option<Value>> {
        macro_rules! get {
            ($e:expr) => {
                match self.eval($e)? {
                    Some(v) => v,
                    None => return Ok(None),
                }
            };
        }
        let call = |f: &crate::func::PureFn, v: &Value| {
            f.apply(v).map_err(|message| Error::Function {
                name: f.name().to_string(),
                message,
            })
        };
        let holds = |node: NodeId, v: Value| match v {
            Value::Bool(b) => Ok(b),
            value => Err(Error::NonBooleanCondition { node, value }),
        };
        Ok(Some(match node.kind() {
            NodeKind::Elementary(_) => self.values[&node.id()].clone(),
            NodeKind::Functional { func, arg } => {
                let a = get!(arg);
                call(func, &a)?
            }
            NodeKind::Tuple { head, tail } => {
                let h = get!(head);
                let t = get!(tail);
                Value::cons(h, &t).ok_or(Error::NotATuple {
                    node: node.id(),
                    value: t,
                })?
            }
            NodeKind::Conditional { target, evidence } => {
                let e = get!(evidence);
                if !holds(node.id(), e)? {
                    return Ok(None);
                }
                get!(target)
            }
            NodeKind::MultiConditional { target, conditions } => {
                for c in conditions {
                    let e = get!(c);
                    if !holds(node.id(), e)? {
                        return Ok(None);
                    }
                }
                get!(target)
            }
            NodeKind::Table { selector, branches } => {
                let key = get!(selector);
                let branch = branches.get(&key).ok_or(Error::MissingTableEntry {
                    node: node.id(),
                    key: key.clone(),
                })?;
                get!(branch)
            }
            NodeKind::MultiFunctional { functions, arg } => {
                let f = get!(functions);
                let func = f.as_func().ok_or_else(|| Error::NonFunctionValue(f.clone()))?.clone();
                let a = get!(arg);
                call(&func, &a)?
            }
            NodeKind::Mixture(alternatives) => {
                self.consulted.push(node.id());
                let i = self.mixtures[&node.id()];
                get!(&alternatives[i])
            }
        }))
    }
}

/// Number of worlds of `root`, saturating.
pub fn world_count(root: &Pex) -> u128 {
    root.reachable()
        .iter()
        .map(|n| match n.kind() {
            NodeKind::Elementary(pmf) => pmf.len() as u128,
            NodeKind::Mixture(alts) => alts.len() as u128,
            _ => 1,
        })
        .fold(1u128, |acc, n| acc.saturating_mul(n))
}

/// Exact distribution of `root` by exhaustive enumeration.
pub fn oracle_marg(root: &Pex) -> Result<Pmf<Prob>> {
    oracle_marg_capped(root, DEFAULT_CAP)
}

pub fn oracle_marg_capped(root: &Pex, cap: u128) -> Result<Pmf<Prob>> {
    let worlds = world_count(root);
    if worlds > cap {
        return Err(Error::CapExceeded { worlds, cap });
    }
    let nodes = root.reachable();
    let axes: Vec<Axis> = nodes
        .iter()
        .filter_map(|n| match n.kind() {
            NodeKind::Elementary(pmf) => Some(Axis::Elementary {
                id: n.id(),
                choices: pmf.iter().collect(),
            }),
            NodeKind::Mixture(alts) => Some(Axis::Mixture {
                id: n.id(),
                arity: alts.len(),
            }),
            _ => None,
        })
        .collect();

    let mut totals: IndexMap<Value, Prob> = IndexMap::new();
    let mut digits = vec![0usize; axes.len()];
    loop {
        let mut world = World {
            values: HashMap::new(),
            mixtures: HashMap::new(),
            consulted: Vec::new(),
            cache: HashMap::new(),
        };
        let mut weight = Prob::one();
        for (axis, &d) in axes.iter().zip(&digits) {
            match axis {
                Axis::Elementary { id, choices } => {
                    let (v, p) = choices[d];
                    world.values.insert(*id, v);
                    weight *= p;
                }
                Axis::Mixture { id, .. } => {
                    world.mixtures.insert(*id, d);
                }
            }
        }
        if let Some(v) = world.eval(root)? {
            let counted = world
                .mixtures
                .iter()
                .all(|(id, &i)| i == 0 || world.consulted.contains(id));
            if counted {
                *totals.entry(v).or_insert_with(Prob::zero) += weight;
            }
        }
        // Odometer step; the last axis turns fastest.
        let mut i = axes.len();
        loop {
            if i == 0 {
                return finish(totals);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < axes[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn finish(totals: IndexMap<Value, Prob>) -> Result<Pmf<Prob>> {
    let mut totals = totals;
    totals.retain(|_, w| !w.is_zero());
    if totals.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let sum: Prob = totals.values().fold(Prob::zero(), |a, w| a + w);
    Pmf::condense(totals.into_iter().map(|(v, w)| (v, w / &sum)))
}

/// `P(event = true)` for a boolean node.
pub fn oracle_joint_prob(event: &Pex) -> Result<Prob> {
    let pmf = oracle_marg(event)?;
    if let Some(v) = pmf.values().find(|v| !matches!(v, Value::Bool(_))) {
        return Err(Error::NonBooleanCondition {
            node: event.id(),
            value: v.clone(),
        });
    }
    Ok(pmf.p_true())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn die() -> Pex {
        Pex::from_ratios((1..=6).map(|i| (Value::int(i), 1, 6))).unwrap()
    }

    #[test]
    fn dice_tuple_given_small_sum() {
        let (d1, d2) = (die(), die());
        let d = Pex::apply("add", &[d1.clone(), d2.clone()]);
        let root = Pex::given(
            &Pex::tuple_of(&[d1, d2, d.clone()]),
            &Pex::apply("le", &[d, Pex::certain(3)]),
        );
        assert_eq!(
            oracle_marg(&root).unwrap().to_string(),
            "{<1, 1, 2>: 1/3, <1, 2, 3>: 1/3, <2, 1, 3>: 1/3}"
        );
    }

    #[test]
    fn joint_prob_of_independent_coins() {
        let coin = || Pex::from_ratios([(Value::sym("tail"), 1, 4), (Value::sym("head"), 3, 4)]).unwrap();
        let eq = Pex::apply("eq", &[coin(), coin()]);
        assert_eq!(oracle_joint_prob(&eq).unwrap(), Prob::new(5.into(), 8.into()));
        assert_eq!(oracle_joint_prob(&Pex::certain(true)).unwrap(), Prob::one());
        assert!(matches!(oracle_joint_prob(&die()), Err(Error::NonBooleanCondition { .. })));
    }

    #[test]
    fn single_elementary_is_its_pmf() {
        let d = die();
        assert_eq!(oracle_marg(&d).unwrap(), *d.pmf().unwrap());
    }

    #[test]
    fn impossible_evidence_and_cap() {
        let (d1, d2) = (die(), die());
        let d = Pex::apply("add", &[d1.clone(), d2.clone()]);
        let root = Pex::given(
            &Pex::apply("gt", &[d1, Pex::certain(3)]),
            &Pex::apply("eq", &[d2, d]),
        );
        assert!(matches!(oracle_marg(&root), Err(Error::EmptyDistribution)));
        assert!(matches!(oracle_marg_capped(&root, 10), Err(Error::CapExceeded { worlds: 36, cap: 10 })));
    }

    #[test]
    fn unconsulted_mixture_counts_once() {
        let two = Pex::mixture(&[Pex::certain(1), Pex::certain(2)]).unwrap();
        let sel = Pex::from_ratios([(Value::Bool(true), 1, 2), (Value::Bool(false), 1, 2)]).unwrap();
        let t = Pex::table(&sel, [(Value::Bool(true), two), (Value::Bool(false), Pex::certain(0))]).unwrap();
        // Unnormalized masses: 1 → 1/2, 2 → 1/2, 0 → 1/2.
        assert_eq!(oracle_marg(&t).unwrap().to_string(), "{1: 1/3, 2: 1/3, 0: 1/3}");
    }
}
