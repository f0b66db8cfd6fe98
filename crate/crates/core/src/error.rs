use thiserror::Error;

use crate::graph::NodeId;
use crate::value::Value;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised while building models or evaluating queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("empty distribution (impossible condition)")]
    EmptyDistribution,

    #[error("condition evaluated to non-boolean value {value} (node {node})")]
    NonBooleanCondition { node: NodeId, value: Value },

    #[error("tuple cell {node} has non-tuple tail value {value}")]
    NotATuple { node: NodeId, value: Value },

    #[error("table has no entry for key {key} (node {node})")]
    MissingTableEntry { node: NodeId, key: Value },

    #[error("function {name} failed: {message}")]
    Function { name: String, message: String },

    #[error("value {0} is not a function")]
    NonFunctionValue(Value),

    #[error("observed value {value} is outside the domain of node {node}")]
    UnknownObservationValue { node: NodeId, value: Value },

    #[error("node {0} is not elementary")]
    NotElementary(NodeId),

    #[error("function {name} expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("{0} requires at least one operand")]
    EmptyOperands(&'static str),

    #[error("possible-worlds enumeration needs {worlds} worlds, cap is {cap}")]
    CapExceeded { worlds: u128, cap: u128 },
}

impl Error {
    /// Short stable name of the error kind, used when comparing outcomes of
    /// two evaluation routes.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPmf(_) => "InvalidPmf",
            Error::EmptyDistribution => "EmptyDistribution",
            Error::NonBooleanCondition { .. } => "NonBooleanCondition",
            Error::MissingTableEntry { .. } => "MissingTableEntry",
            Error::NotATuple { .. } => "NotATuple",
            Error::Function { .. } => "FunctionError",
            Error::NonFunctionValue(_) => "NonFunctionValue",
            Error::UnknownObservationValue { .. } => "UnknownObservationValue",
            Error::NotElementary(_) => "NotElementary",
            Error::Arity { .. } => "Arity",
            Error::EmptyOperands(_) => "EmptyOperands",
            Error::CapExceeded { .. } => "CapExceeded",
        }
    }
}
