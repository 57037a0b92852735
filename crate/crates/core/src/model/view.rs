//! Read-confined access to a node's neighborhood.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Configuration, ForestNetwork, NodeId, VarId, VariableSchema};

/// Position of the node being read relative to the reading node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// The reading node itself.
    #[serde(rename = "self")]
    Own,
    Parent,
    Children,
    /// Neighbors that are neither the parent nor a child.
    OtherNeighbors,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Own => "self",
            Relation::Parent => "parent",
            Relation::Children => "children",
            Relation::OtherNeighbors => "other-neighbors",
        })
    }
}

/// A declared read: variable `var` at the nodes in `relation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReadDecl {
    pub relation: Relation,
    pub var: VarId,
}

impl ReadDecl {
    pub fn new(relation: Relation, var: VarId) -> Self {
        Self { relation, var }
    }
}

/// The set of reads a family declares.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadSet(BTreeSet<ReadDecl>);

impl ReadSet {
    pub fn contains(&self, relation: Relation, var: VarId) -> bool {
        self.0.contains(&ReadDecl { relation, var })
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReadDecl> {
        self.0.iter()
    }

    pub fn insert(&mut self, decl: ReadDecl) -> bool {
        self.0.insert(decl)
    }

    pub fn remove(&mut self, decl: &ReadDecl) -> bool {
        self.0.remove(decl)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &ReadSet) -> ReadSet {
        ReadSet(self.0.union(&other.0).copied().collect())
    }
}

impl FromIterator<ReadDecl> for ReadSet {
    fn from_iter<T: IntoIterator<Item = ReadDecl>>(iter: T) -> Self {
        ReadSet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("undeclared read of `{var}` at relation {relation}")]
    UndeclaredRead { relation: Relation, var: String },
    #[error("arithmetic overflow while evaluating")]
    Overflow,
    #[error("statement assigned {value} to `{var}`, outside its domain")]
    DomainViolation { var: String, value: i64 },
    #[error("statement produced {got} values for {expected} written variables")]
    Arity { expected: usize, got: usize },
}

/// What a guard or statement may see when evaluated at one node.
///
/// Every accessor checks the (relation, variable) pair against the family's
/// declared reads; undeclared access is an [`EvalError::UndeclaredRead`].
/// Structural constants (degree, root/leaf status) are always visible.
pub struct LocalView<'a> {
    net: &'a ForestNetwork,
    schema: &'a VariableSchema,
    cfg: &'a Configuration,
    node: NodeId,
    reads: &'a ReadSet,
}

impl<'a> LocalView<'a> {
    pub fn new(
        net: &'a ForestNetwork,
        schema: &'a VariableSchema,
        cfg: &'a Configuration,
        node: NodeId,
        reads: &'a ReadSet,
    ) -> Self {
        Self {
            net,
            schema,
            cfg,
            node,
            reads,
        }
    }

    fn check(&self, relation: Relation, var: VarId) -> Result<(), EvalError> {
        if self.reads.contains(relation, var) {
            Ok(())
        } else {
            Err(EvalError::UndeclaredRead {
                relation,
                var: self.schema.name(var).to_string(),
            })
        }
    }

    pub fn node(&self) -> NodeId {
        self.node
    }

    pub fn is_root(&self) -> bool {
        self.net.is_root(self.node)
    }

    pub fn is_leaf(&self) -> bool {
        self.net.is_leaf(self.node)
    }

    pub fn degree(&self) -> usize {
        self.net.degree(self.node)
    }

    pub fn child_count(&self) -> usize {
        self.net.children(self.node).len()
    }

    /// Value of `var` at the node itself.
    pub fn own(&self, var: VarId) -> Result<i64, EvalError> {
        self.check(Relation::Own, var)?;
        Ok(self.cfg.get(self.node, var))
    }

    /// Value of `var` at the parent, `None` at a root.
    pub fn parent(&self, var: VarId) -> Result<Option<i64>, EvalError> {
        self.check(Relation::Parent, var)?;
        Ok(self.net.parent(self.node).map(|q| self.cfg.get(q, var)))
    }

    /// Values of `var` at every child.
    pub fn children(&self, var: VarId) -> Result<Vec<i64>, EvalError> {
        self.check(Relation::Children, var)?;
        Ok(self
            .net
            .children(self.node)
            .iter()
            .map(|&q| self.cfg.get(q, var))
            .collect())
    }

    /// Overflow-checked sum of `var` over the children.
    pub fn children_sum(&self, var: VarId) -> Result<i64, EvalError> {
        self.children(var)?
            .into_iter()
            .try_fold(0i64, |acc, x| acc.checked_add(x).ok_or(EvalError::Overflow))
    }

    /// Values of `var` at neighbors that are neither parent nor child.
    pub fn others(&self, var: VarId) -> Result<Vec<i64>, EvalError> {
        self.check(Relation::OtherNeighbors, var)?;
        let parent = self.net.parent(self.node);
        let children = self.net.children(self.node);
        Ok(self
            .net
            .neighbors(self.node)
            .iter()
            .filter(|&&q| Some(q) != parent && !children.contains(&q))
            .map(|&q| self.cfg.get(q, var))
            .collect())
    }
}

/// Overflow-checked addition for use inside statements.
pub fn checked_add(a: i64, b: i64) -> Result<i64, EvalError> {
    a.checked_add(b).ok_or(EvalError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;

    #[test]
    fn confinement_is_enforced() {
        let schema = VariableSchema::builder()
            .writable("x", 0, Domain::Natural)
            .build()
            .unwrap();
        let x = schema.var("x").unwrap();
        let net = ForestNetwork::line(3);
        let cfg = Configuration::new(&net, &schema, |p, _| p.0 as i64 + 1).unwrap();
        let reads: ReadSet = [
            ReadDecl::new(Relation::Own, x),
            ReadDecl::new(Relation::Children, x),
        ]
        .into_iter()
        .collect();
        let view = LocalView::new(&net, &schema, &cfg, NodeId(1), &reads);
        assert_eq!(view.own(x).unwrap(), 2);
        assert_eq!(view.children_sum(x).unwrap(), 3);
        assert_eq!(
            view.parent(x).unwrap_err(),
            EvalError::UndeclaredRead {
                relation: Relation::Parent,
                var: "x".into()
            }
        );
        assert!(view.others(x).is_err());
    }

    #[test]
    fn other_neighbors_exclude_tree_edges() {
        let schema = VariableSchema::builder()
            .writable("x", 0, Domain::Natural)
            .build()
            .unwrap();
        let x = schema.var("x").unwrap();
        // triangle 0-1-2 with tree edges 0-1 and 0-2; edge 1-2 is a non-tree edge
        let net = ForestNetwork::from_adjacency(
            vec![vec![1, 2], vec![0, 2], vec![0, 1]],
            vec![None, Some(0), Some(0)],
        )
        .unwrap();
        let cfg = Configuration::new(&net, &schema, |p, _| 10 * p.0 as i64).unwrap();
        let reads: ReadSet = [ReadDecl::new(Relation::OtherNeighbors, x)]
            .into_iter()
            .collect();
        let view = LocalView::new(&net, &schema, &cfg, NodeId(1), &reads);
        assert_eq!(view.others(x).unwrap(), vec![20]);
    }

    #[test]
    fn children_sum_detects_overflow() {
        let schema = VariableSchema::builder()
            .writable("x", 0, Domain::Natural)
            .build()
            .unwrap();
        let x = schema.var("x").unwrap();
        let net = ForestNetwork::star(3);
        let cfg = Configuration::new(&net, &schema, |_, _| i64::MAX).unwrap();
        let reads: ReadSet = [ReadDecl::new(Relation::Children, x)].into_iter().collect();
        let view = LocalView::new(&net, &schema, &cfg, NodeId(0), &reads);
        assert_eq!(view.children_sum(x).unwrap_err(), EvalError::Overflow);
    }
}
