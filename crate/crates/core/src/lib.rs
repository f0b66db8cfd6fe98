//! Exact marginalization of finite discrete random variables.
//!
//! Models are DAGs of [`Pex`] nodes. [`engine::marg`] computes the exact
//! distribution of any node by lazy, binding-aware enumeration of atoms;
//! [`oracle::oracle_marg`] computes the same thing by brute force over all
//! possible worlds and exists to cross-check the engine. The [`dsl`] module
//! parses a small textual modeling language into such DAGs.
//!
//! ```
//! use statues::{marg, Pex, Value};
//!
//! let b1 = Pex::from_ratios([(Value::int(0), 1, 3), (Value::int(1), 2, 3)]).unwrap();
//! let b2 = Pex::from_ratios([(Value::int(0), 3, 4), (Value::int(1), 1, 4)]).unwrap();
//! let s = Pex::apply("add", &[b1, b2]);
//! assert_eq!(marg(&s).unwrap().to_string(), "{0: 1/4, 1: 7/12, 2: 1/6}");
//! ```

pub mod builtins;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod func;
pub mod graph;
pub mod oracle;
pub mod pmf;
pub mod random;
pub mod scalar;
pub mod value;

pub use engine::{marg, marg_traced, marg_with, marg_with_observations, Enumerator, Options};
pub use error::{Error, Result};
pub use func::PureFn;
pub use graph::{NodeId, NodeKind, Pex};
pub use oracle::{oracle_joint_prob, oracle_marg};
pub use pmf::{format_prob, Pmf, ProbFormat};
pub use scalar::Probability;
pub use value::Value;

/// Exact probability.
pub type Prob = num_rational::BigRational;
/// Distribution with exact probabilities.
pub type ExactPmf = Pmf<Prob>;
/// Distribution accumulated in double precision.
pub type FloatPmf = Pmf<f64>;
/// Distribution accumulated in single precision.
pub type Float32Pmf = Pmf<f32>;
