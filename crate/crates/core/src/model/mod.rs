//! Networks, variables, configurations, guarded-action families and the
//! step semantics they execute under.

mod algorithm;
mod config;
mod network;
mod schema;
mod step;
mod view;

use thiserror::Error;

pub use algorithm::{AlgorithmSpec, FamilySpec, GuardFn, LegitimacyFn, StatementFn};
pub use config::Configuration;
pub use network::{ForestNetwork, NetworkError, NodeId, RawNetwork, RawNode};
pub use schema::{Domain, FamilyId, SchemaBuilder, VarDecl, VarId, VarKind, VariableSchema};
pub use step::{
    apply_step, enabled_nodes, enabled_set, is_enabled, is_terminal, Activation, StepError,
};
pub use view::{checked_add, EvalError, LocalView, ReadDecl, ReadSet, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("finite domain of `{0}` is empty")]
    EmptyDomain(String),
    #[error("family {0} owns no writable variable")]
    EmptyBlock(FamilyId),
    #[error(
        "schema partitions writables into {partition} blocks but {families} families were given"
    )]
    FamilyCountMismatch { partition: usize, families: usize },
    #[error("family `{0}` must write exactly its partition block")]
    WritesMismatch(String),
    #[error("node {node} has no value for constant `{name}`")]
    MissingConstant { node: NodeId, name: String },
    #[error("value {value} of `{name}` at node {node} is outside its domain")]
    OutOfDomain {
        node: NodeId,
        name: String,
        value: i64,
    },
    #[error("`{0}` is a constant and cannot be written")]
    ConstantWrite(String),
}
