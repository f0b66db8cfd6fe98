//! Random small models for property tests.
//!
//! Models are built bottom-up from a typed pool of nodes, so every generated
//! DAG evaluates without function errors. The only failure a generated model
//! can raise is an empty distribution from unsatisfiable evidence. Table
//! selectors get a branch for each value of their support.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builtins::builtin;
use crate::graph::Pex;
use crate::oracle::oracle_marg;
use crate::value::Value;
use crate::Prob;

/// Static type of the values a generated node produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ty {
    Num,
    Bool,
    Tuple(Vec<Ty>),
    Func,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub max_elementaries: usize,
    /// Largest domain of an elementary node.
    pub max_domain: usize,
    pub max_level: usize,
    /// Number of derived nodes attempted per model.
    pub derived: std::ops::RangeInclusive<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_elementaries: 6,
            max_domain: 4,
            max_level: 6,
            derived: 4..=10,
        }
    }
}

/// Every node kind name, as reported by [`Pex::kind_name`].
pub const KINDS: [&str; 8] = [
    "elementary",
    "tuple",
    "functional",
    "conditional",
    "table",
    "multi-conditional",
    "multi-functional",
    "mixture",
];

#[derive(Debug, Clone)]
pub struct RandomModel {
    /// The last derived node built, or an elementary if none could be.
    pub root: Pex,
    /// Every node built, in creation order, with its type.
    pub pool: Vec<(Pex, Ty)>,
}

impl RandomModel {
    pub fn of_type(&self, ty: &Ty) -> Vec<&Pex> {
        self.pool.iter().filter(|(_, t)| t == ty).map(|(n, _)| n).collect()
    }

    pub fn elementaries(&self) -> Vec<&Pex> {
        self.pool.iter().map(|(n, _)| n).filter(|n| n.is_elementary()).collect()
    }

    pub fn root_ty(&self) -> &Ty {
        &self.pool.iter().find(|(n, _)| *n == self.root).expect("root is pooled").1
    }
}

/// Builds one model from `seed`.
pub fn model_from_seed(seed: u64, cfg: &Config) -> RandomModel {
    Generator::new(ChaCha8Rng::seed_from_u64(seed), cfg.clone()).model()
}

pub struct Generator<R> {
    rng: R,
    cfg: Config,
    pool: Vec<(Pex, Ty)>,
    elementaries: usize,
}

const NUM_BINARY: &[&str] = &["add", "sub", "mul", "min", "max"];
const NUM_UNARY: &[&str] = &["neg", "abs"];
const CMP: &[&str] = &["eq", "ne", "lt", "le", "gt", "ge"];
const LOGIC: &[&str] = &["and", "or", "implies", "iff"];

impl<R: Rng> Generator<R> {
    pub fn new(rng: R, cfg: Config) -> Self {
        Generator {
            rng,
            cfg,
            pool: Vec::new(),
            elementaries: 0,
        }
    }

    /// A fresh model; the pool is reset first.
    pub fn model(&mut self) -> RandomModel {
        self.pool.clear();
        self.elementaries = 0;
        // At least one number and one boolean; one slot stays free for a
        // function-valued elementary.
        let leaves = self.rng.gen_range(2..self.cfg.max_elementaries.max(3));
        for i in 0..leaves {
            let node = if i == 1 || (i > 1 && self.rng.gen_bool(0.3)) {
                self.bool_elementary()
            } else {
                self.num_elementary()
            };
            self.push(node.0, node.1);
        }
        let mut root = None;
        let target = self.rng.gen_range(self.cfg.derived.clone());
        let mut attempts = 0;
        let mut built = 0;
        while built < target && attempts < target * 8 {
            attempts += 1;
            if let Some((node, ty)) = self.derived() {
                if node.level() > self.cfg.max_level {
                    continue;
                }
                self.push(node.clone(), ty);
                root = Some(node);
                built += 1;
            }
        }
        let root = root.unwrap_or_else(|| self.pool[0].0.clone());
        RandomModel {
            root,
            pool: self.pool.clone(),
        }
    }

    /// A node of type `ty` drawn from a fresh model, if one exists.
    pub fn node_of_type(&mut self, ty: &Ty) -> Pex {
        loop {
            let m = self.model();
            let candidates: Vec<&Pex> = m.of_type(ty).into_iter().filter(|n| !n.is_elementary()).collect();
            if let Some(n) = candidates.last() {
                return (*n).clone();
            }
        }
    }

    fn push(&mut self, node: Pex, ty: Ty) {
        if node.is_elementary() {
            self.elementaries += 1;
        }
        self.pool.push((node, ty));
    }

    fn weights(&mut self, n: usize) -> Vec<Prob> {
        let raw: Vec<i64> = (0..n).map(|_| self.rng.gen_range(1..=4)).collect();
        let total: i64 = raw.iter().sum();
        raw.into_iter()
            .map(|w| Prob::new(BigInt::from(w), BigInt::from(total)))
            .collect()
    }

    fn num_elementary(&mut self) -> (Pex, Ty) {
        let size = self.rng.gen_range(1..=self.cfg.max_domain);
        let mut values: Vec<i64> = (-2..=3).collect();
        values.shuffle(&mut self.rng);
        values.truncate(size);
        let ws = self.weights(size);
        let node = Pex::elementary(values.into_iter().map(Value::int).zip(ws)).expect("valid pmf");
        (node, Ty::Num)
    }

    fn bool_elementary(&mut self) -> (Pex, Ty) {
        let node = if self.rng.gen_bool(0.1) {
            Pex::certain(self.rng.gen_bool(0.5))
        } else {
            let ws = self.weights(2);
            Pex::elementary([Value::Bool(true), Value::Bool(false)].into_iter().zip(ws)).expect("valid pmf")
        };
        (node, Ty::Bool)
    }

    /// An index below `len`, skewed towards recent nodes so DAGs grow deep.
    fn recent(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len).max(self.rng.gen_range(0..len))
    }

    fn pick(&mut self, ty: &Ty) -> Option<Pex> {
        let matching: Vec<Pex> = self.pool.iter().filter(|(_, t)| t == ty).map(|(n, _)| n.clone()).collect();
        if matching.is_empty() {
            return None;
        }
        let i = self.recent(matching.len());
        Some(matching[i].clone())
    }

    /// Any pooled node that is not function-valued.
    fn pick_any(&mut self) -> (Pex, Ty) {
        let data: Vec<(Pex, Ty)> = self.pool.iter().filter(|(_, t)| *t != Ty::Func).cloned().collect();
        let i = self.recent(data.len());
        data[i].clone()
    }

    fn derived(&mut self) -> Option<(Pex, Ty)> {
        match self.rng.gen_range(0..7) {
            0 => self.tuple(),
            1 => self.functional(),
            2 => self.conditional(),
            3 => self.table(),
            4 => self.multi_conditional(),
            5 => self.multi_functional(),
            _ => self.mixture(),
        }
    }

    fn tuple(&mut self) -> Option<(Pex, Ty)> {
        let n = self.rng.gen_range(2..=3);
        let (items, tys): (Vec<Pex>, Vec<Ty>) = (0..n).map(|_| self.pick_any()).unzip();
        Some((Pex::tuple_of(&items), Ty::Tuple(tys)))
    }

    fn functional(&mut self) -> Option<(Pex, Ty)> {
        match self.rng.gen_range(0..6) {
            0 => {
                let f = *NUM_BINARY.choose(&mut self.rng)?;
                let (a, b) = (self.pick(&Ty::Num)?, self.pick(&Ty::Num)?);
                Some((Pex::apply(f, &[a, b]), Ty::Num))
            }
            1 => {
                let f = *NUM_UNARY.choose(&mut self.rng)?;
                Some((Pex::apply(f, &[self.pick(&Ty::Num)?]), Ty::Num))
            }
            2 => {
                let f = *CMP.choose(&mut self.rng)?;
                let a = self.pick(&Ty::Num)?;
                let b = if self.rng.gen_bool(0.3) {
                    Pex::certain(self.rng.gen_range(-1i64..=2))
                } else {
                    self.pick(&Ty::Num)?
                };
                Some((Pex::apply(f, &[a, b]), Ty::Bool))
            }
            3 => {
                if self.rng.gen_bool(0.25) {
                    return Some((Pex::apply("not", &[self.pick(&Ty::Bool)?]), Ty::Bool));
                }
                let f = *LOGIC.choose(&mut self.rng)?;
                let (a, b) = (self.pick(&Ty::Bool)?, self.pick(&Ty::Bool)?);
                Some((Pex::apply(f, &[a, b]), Ty::Bool))
            }
            4 => {
                let tuples: Vec<(Pex, Vec<Ty>)> = self
                    .pool
                    .iter()
                    .filter_map(|(n, t)| match t {
                        Ty::Tuple(items) => Some((n.clone(), items.clone())),
                        _ => None,
                    })
                    .collect();
                let (t, items) = tuples.choose(&mut self.rng)?.clone();
                let i = self.rng.gen_range(0..items.len());
                let node = Pex::apply("extract", &[t, Pex::certain(i as i64 + 1)]);
                Some((node, items[i].clone()))
            }
            _ => {
                let x = self.pick(&Ty::Num)?;
                let members = (-2..=3).filter(|_| self.rng.gen_bool(0.4)).map(Value::int);
                let set = Pex::certain(Value::tuple(members));
                Some((Pex::apply("in_set", &[x, set]), Ty::Bool))
            }
        }
    }

    fn conditional(&mut self) -> Option<(Pex, Ty)> {
        let (target, ty) = self.pick_any();
        let evidence = self.pick(&Ty::Bool)?;
        Some((Pex::given(&target, &evidence), ty))
    }

    fn multi_conditional(&mut self) -> Option<(Pex, Ty)> {
        let (target, ty) = self.pick_any();
        let n = self.rng.gen_range(1..=3);
        let conds = (0..n).map(|_| self.pick(&Ty::Bool)).collect::<Option<Vec<_>>>()?;
        Some((Pex::multi_given(&target, &conds).ok()?, ty))
    }

    fn table(&mut self) -> Option<(Pex, Ty)> {
        let selector = if self.rng.gen_bool(0.5) {
            self.pick(&Ty::Bool)?
        } else {
            self.pick(&Ty::Num)?
        };
        let support: Vec<Value> = oracle_marg(&selector).ok()?.values().cloned().collect();
        let (first, ty) = self.pick_any();
        let mut branches = Vec::with_capacity(support.len());
        for (i, key) in support.into_iter().enumerate() {
            let branch = if i == 0 { first.clone() } else { self.pick(&ty)? };
            branches.push((key, branch));
        }
        Some((Pex::table(&selector, branches).ok()?, ty))
    }

    fn multi_functional(&mut self) -> Option<(Pex, Ty)> {
        let functions = match self.pick(&Ty::Func) {
            Some(f) if self.rng.gen_bool(0.5) || self.elementaries >= self.cfg.max_elementaries => f,
            _ if self.elementaries < self.cfg.max_elementaries => {
                let mut names = NUM_BINARY.to_vec();
                names.shuffle(&mut self.rng);
                names.truncate(self.rng.gen_range(1..=3));
                let ws = self.weights(names.len());
                let f = Pex::elementary(names.into_iter().map(|n| Value::Func(builtin(n))).zip(ws))
                    .expect("valid pmf");
                self.push(f.clone(), Ty::Func);
                f
            }
            _ => return None,
        };
        let (a, b) = (self.pick(&Ty::Num)?, self.pick(&Ty::Num)?);
        Some((Pex::multi_func(&functions, &[a, b]).ok()?, Ty::Num))
    }

    fn mixture(&mut self) -> Option<(Pex, Ty)> {
        let (first, ty) = self.pick_any();
        let n = self.rng.gen_range(2..=3);
        let mut alts = vec![first];
        for _ in 1..n {
            alts.push(self.pick(&ty)?);
        }
        Some((Pex::mixture(&alts).ok()?, ty))
    }
}

/// Kind names present among the nodes reachable from `root`.
pub fn reachable_kinds(root: &Pex) -> Vec<&'static str> {
    let mut out: Vec<&'static str> = root.reachable().iter().map(|n| n.kind_name()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_respect_bounds() {
        let cfg = Config::default();
        for seed in 0..200 {
            let m = model_from_seed(seed, &cfg);
            assert!(m.elementaries().len() <= cfg.max_elementaries);
            for (n, _) in &m.pool {
                assert!(n.level() <= cfg.max_level);
                if let Some(p) = n.pmf() {
                    assert!(p.len() <= cfg.max_domain.max(5));
                }
            }
        }
    }

    #[test]
    fn same_seed_same_shape() {
        let cfg = Config::default();
        let a = model_from_seed(7, &cfg);
        let b = model_from_seed(7, &cfg);
        assert_eq!(a.pool.len(), b.pool.len());
        assert_eq!(a.root.kind_name(), b.root.kind_name());
        assert_eq!(oracle_marg(&a.root).ok(), oracle_marg(&b.root).ok());
    }
}
