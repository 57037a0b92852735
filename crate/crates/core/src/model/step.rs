//! Composite-atomicity step semantics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AlgorithmSpec, Configuration, EvalError, FamilyId, ForestNetwork, NodeId};

/// Execution of family `family` at node `node` within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Activation {
    pub node: NodeId,
    pub family: FamilyId,
}

impl Activation {
    pub fn new(node: usize, family: usize) -> Self {
        Self {
            node: NodeId(node),
            family: FamilyId(family),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("empty selection")]
    EmptySelection,
    #[error("two families selected at node {0}")]
    DuplicateNode(NodeId),
    #[error("selected activation {0} is not enabled")]
    Disabled(Activation),
    #[error("activation {0} refers to an unknown node or family")]
    Unknown(Activation),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub fn is_enabled(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
    p: NodeId,
    f: FamilyId,
) -> Result<bool, EvalError> {
    alg.eval_guard(net, cfg, p, f)
}

/// All enabled `(node, family)` pairs, sorted by node then family.
pub fn enabled_set(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
) -> Result<Vec<Activation>, EvalError> {
    let mut out = Vec::new();
    for p in net.nodes() {
        for f in alg.family_ids() {
            if alg.eval_guard(net, cfg, p, f)? {
                out.push(Activation { node: p, family: f });
            }
        }
    }
    Ok(out)
}

/// Per-node flag: does the node have at least one enabled family?
pub fn enabled_nodes(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
) -> Result<Vec<bool>, EvalError> {
    let mut out = vec![false; net.len()];
    for p in net.nodes() {
        for f in alg.family_ids() {
            if alg.eval_guard(net, cfg, p, f)? {
                out[p.0] = true;
                break;
            }
        }
    }
    Ok(out)
}

pub fn is_terminal(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
) -> Result<bool, EvalError> {
    Ok(enabled_nodes(net, alg, cfg)?.iter().all(|e| !e))
}

/// Applies one step: every selected statement reads the pre-state `cfg`,
/// then all writes land together.
pub fn apply_step(
    net: &ForestNetwork,
    alg: &AlgorithmSpec,
    cfg: &Configuration,
    selection: &[Activation],
) -> Result<Configuration, StepError> {
    if selection.is_empty() {
        return Err(StepError::EmptySelection);
    }
    let mut seen = vec![false; net.len()];
    let mut writes = Vec::with_capacity(selection.len());
    for &act in selection {
        if act.node.0 >= net.len() || act.family.0 >= alg.k() {
            return Err(StepError::Unknown(act));
        }
        if std::mem::replace(&mut seen[act.node.0], true) {
            return Err(StepError::DuplicateNode(act.node));
        }
        if !alg.eval_guard(net, cfg, act.node, act.family)? {
            return Err(StepError::Disabled(act));
        }
        writes.push((act, alg.eval_statement(net, cfg, act.node, act.family)?));
    }
    let mut next = cfg.clone();
    for (act, values) in writes {
        for (&v, value) in alg.family(act.family).writes().iter().zip(values) {
            next.put(act.node, v, value);
        }
    }
    Ok(next)
}
