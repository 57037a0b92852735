//! Networks endowed with a spanning forest.
//!
//! The forest is given by a `parent` pointer per node; `children`, heights,
//! levels, the forest height `H` and the maximum degree `Δ` are derived once at
//! validation time and never change afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("network has no nodes")]
    Empty,
    #[error("node ids must cover 0..{n} exactly once (offending id {id})")]
    BadNodeIds { n: usize, id: usize },
    #[error("edge ({0}, {1}) references an unknown node")]
    UnknownEndpoint(usize, usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("adjacency is not symmetric: {0} lists {1} but not conversely")]
    NonSymmetric(usize, usize),
    #[error("parent of node {node} is {parent}, which is not a neighbor")]
    ParentNotNeighbor { node: usize, parent: usize },
    #[error("parent relation cyclic (cycle through node {0})")]
    CyclicParents(usize),
    #[error("node {child} is listed as a child of {listed_by} but its parent is {actual:?}")]
    OrphanInconsistency {
        child: usize,
        listed_by: usize,
        actual: Option<usize>,
    },
    #[error("parent and adjacency vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// One node of a raw (unvalidated) network description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawNode {
    pub id: usize,
    #[serde(default)]
    pub parent: Option<usize>,
    /// Optional explicit children list, cross-checked against `parent`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<usize>>,
    #[serde(default)]
    pub consts: BTreeMap<String, i64>,
}

/// Network as read from disk: node list, undirected edge list and parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawNetwork {
    pub nodes: Vec<RawNode>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
}

/// A validated network with its spanning forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNetwork {
    adjacency: Vec<Vec<NodeId>>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    height: Vec<usize>,
    level: Vec<usize>,
    max_height: usize,
    max_degree: usize,
    consts: Vec<BTreeMap<String, i64>>,
}

impl ForestNetwork {
    /// Validates a raw network description (the `validate_network` operation).
    pub fn validate(raw: &RawNetwork) -> Result<Self, NetworkError> {
        let n = raw.nodes.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        let mut slots: Vec<Option<&RawNode>> = vec![None; n];
        for node in &raw.nodes {
            if node.id >= n || slots[node.id].is_some() {
                return Err(NetworkError::BadNodeIds { n, id: node.id });
            }
            slots[node.id] = Some(node);
        }
        let nodes: Vec<&RawNode> = slots
            .into_iter()
            .map(|s| s.expect("all ids seen"))
            .collect();

        let mut adjacency = vec![BTreeSet::new(); n];
        for &[a, b] in &raw.edges {
            if a >= n || b >= n {
                return Err(NetworkError::UnknownEndpoint(a, b));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        let parent: Vec<Option<usize>> = nodes.iter().map(|node| node.parent).collect();
        let consts = nodes.iter().map(|node| node.consts.clone()).collect();
        let net = Self::build(adjacency, parent, consts)?;

        for node in &nodes {
            if let Some(listed) = &node.children {
                for &c in listed {
                    let actual = net.parent.get(c).copied().flatten().map(NodeId::index);
                    if actual != Some(node.id) {
                        return Err(NetworkError::OrphanInconsistency {
                            child: c,
                            listed_by: node.id,
                            actual,
                        });
                    }
                }
                // children derived from parent pointers must all be listed too
                for c in &net.children[node.id] {
                    if !listed.contains(&c.0) {
                        return Err(NetworkError::OrphanInconsistency {
                            child: c.0,
                            listed_by: node.id,
                            actual: Some(node.id),
                        });
                    }
                }
            }
        }
        Ok(net)
    }

    /// Builds a network from per-node neighbor lists (checked for symmetry).
    pub fn from_adjacency(
        adjacency: Vec<Vec<usize>>,
        parent: Vec<Option<usize>>,
    ) -> Result<Self, NetworkError> {
        let n = adjacency.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        if parent.len() != n {
            return Err(NetworkError::LengthMismatch(parent.len(), n));
        }
        let mut sets = vec![BTreeSet::new(); n];
        for (p, list) in adjacency.iter().enumerate() {
            for &q in list {
                if q >= n {
                    return Err(NetworkError::UnknownEndpoint(p, q));
                }
                if !adjacency[q].contains(&p) {
                    return Err(NetworkError::NonSymmetric(p, q));
                }
                sets[p].insert(q);
            }
        }
        Self::build(sets, parent, vec![BTreeMap::new(); n])
    }

    fn build(
        adjacency: Vec<BTreeSet<usize>>,
        parent: Vec<Option<usize>>,
        consts: Vec<BTreeMap<String, i64>>,
    ) -> Result<Self, NetworkError> {
        let n = adjacency.len();
        for (p, neighbors) in adjacency.iter().enumerate() {
            if neighbors.contains(&p) {
                return Err(NetworkError::SelfLoop(p));
            }
        }
        for (p, par) in parent.iter().enumerate() {
            if let Some(q) = *par {
                if q >= n || !adjacency[p].contains(&q) {
                    return Err(NetworkError::ParentNotNeighbor { node: p, parent: q });
                }
            }
        }

        // levels by walking to the root; a walk longer than n means a cycle
        let mut level = vec![usize::MAX; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut cur = start;
            while level[cur] == usize::MAX {
                if path.len() > n {
                    return Err(NetworkError::CyclicParents(start));
                }
                path.push(cur);
                match parent[cur] {
                    Some(q) => cur = q,
                    None => {
                        level[cur] = 0;
                        path.pop();
                        break;
                    }
                }
            }
            let mut base = level[cur];
            while let Some(p) = path.pop() {
                base += 1;
                level[p] = base;
            }
        }

        let mut children = vec![Vec::new(); n];
        for (p, par) in parent.iter().enumerate() {
            if let Some(q) = *par {
                children[q].push(NodeId(p));
            }
        }

        // heights: process nodes by decreasing level so children come first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| std::cmp::Reverse(level[p]));
        let mut height = vec![0usize; n];
        for &p in &order {
            if let Some(q) = parent[p] {
                height[q] = height[q].max(height[p] + 1);
            }
        }
        let max_height = (0..n)
            .filter(|&p| parent[p].is_none())
            .map(|p| height[p])
            .max()
            .unwrap_or(0);
        let max_degree = adjacency.iter().map(BTreeSet::len).max().unwrap_or(0);

        Ok(Self {
            adjacency: adjacency
                .into_iter()
                .map(|s| s.into_iter().map(NodeId).collect())
                .collect(),
            parent: parent.into_iter().map(|p| p.map(NodeId)).collect(),
            children,
            height,
            level,
            max_height,
            max_degree,
            consts,
        })
    }

    /// Directed line `0 - 1 - ... - (n-1)` rooted at node 0.
    pub fn line(n: usize) -> Self {
        let parent = (0..n).map(|i| i.checked_sub(1)).collect();
        Self::from_parents(parent).expect("a line is a valid forest")
    }

    /// Star with node 0 as root and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        let parent = (0..n)
            .map(|i| if i == 0 { None } else { Some(0) })
            .collect();
        Self::from_parents(parent).expect("a star is a valid forest")
    }

    /// Network whose only edges are the tree edges given by `parent`.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Result<Self, NetworkError> {
        let n = parent.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        let mut adjacency = vec![BTreeSet::new(); n];
        for (p, par) in parent.iter().enumerate() {
            if let Some(q) = *par {
                if q >= n {
                    return Err(NetworkError::UnknownEndpoint(p, q));
                }
                adjacency[p].insert(q);
                adjacency[q].insert(p);
            }
        }
        Self::build(adjacency, parent, vec![BTreeMap::new(); n])
    }

    /// Returns a copy with the given constant set at every node.
    pub fn with_const(mut self, name: &str, value: impl Fn(NodeId) -> i64) -> Self {
        for (p, consts) in self.consts.iter_mut().enumerate() {
            consts.insert(name.to_string(), value(NodeId(p)));
        }
        self
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).map(NodeId)
    }

    pub fn neighbors(&self, p: NodeId) -> &[NodeId] {
        &self.adjacency[p.0]
    }

    pub fn parent(&self, p: NodeId) -> Option<NodeId> {
        self.parent[p.0]
    }

    pub fn children(&self, p: NodeId) -> &[NodeId] {
        &self.children[p.0]
    }

    pub fn is_root(&self, p: NodeId) -> bool {
        self.parent[p.0].is_none()
    }

    pub fn is_leaf(&self, p: NodeId) -> bool {
        self.children[p.0].is_empty()
    }

    pub fn degree(&self, p: NodeId) -> usize {
        self.adjacency[p.0].len()
    }

    /// Height of `p` in its tree (0 for leaves).
    pub fn height_of(&self, p: NodeId) -> usize {
        self.height[p.0]
    }

    /// Distance from `p` to the root of its tree.
    pub fn level_of(&self, p: NodeId) -> usize {
        self.level[p.0]
    }

    /// `H`: the maximum height over all roots.
    pub fn height(&self) -> usize {
        self.max_height
    }

    /// `Δ`: the maximum degree.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn roots(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(|&p| self.is_root(p))
    }

    pub fn constant(&self, p: NodeId, name: &str) -> Option<i64> {
        self.consts[p.0].get(name).copied()
    }

    /// `p` followed by its ancestors up to the root.
    pub fn ancestors(&self, p: NodeId) -> Vec<NodeId> {
        let mut out = vec![p];
        let mut cur = p;
        while let Some(q) = self.parent(cur) {
            out.push(q);
            cur = q;
        }
        out
    }

    /// Root of the tree containing `p`.
    pub fn root_of(&self, p: NodeId) -> NodeId {
        let mut cur = p;
        while let Some(q) = self.parent(cur) {
            cur = q;
        }
        cur
    }

    /// `p` and every node of its subtree, in pre-order.
    pub fn descendants(&self, p: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![p];
        while let Some(q) = stack.pop() {
            out.push(q);
            stack.extend(self.children(q).iter().rev().copied());
        }
        out
    }

    /// Back to the serializable description.
    pub fn to_raw(&self) -> RawNetwork {
        let nodes = self
            .nodes()
            .map(|p| RawNode {
                id: p.0,
                parent: self.parent(p).map(NodeId::index),
                children: None,
                consts: self.consts[p.0].clone(),
            })
            .collect();
        let mut edges = Vec::new();
        for p in self.nodes() {
            for q in self.neighbors(p) {
                if p < *q {
                    edges.push([p.0, q.0]);
                }
            }
        }
        RawNetwork { nodes, edges }
    }
}
