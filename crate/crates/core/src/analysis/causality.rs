use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::model::{AlgorithmSpec, FamilyId};

/// Graph of actions' causality: an edge `(j, i)` whenever family `i`
/// declares a read of a variable written by family `j ≠ i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalityGraph {
    k: usize,
    edges: BTreeSet<(FamilyId, FamilyId)>,
    family_heights: Vec<Option<usize>>,
    height: Option<usize>,
    in_degree: usize,
    acyclic: bool,
}

impl CausalityGraph {
    pub fn from_edges(k: usize, edges: impl IntoIterator<Item = (FamilyId, FamilyId)>) -> Self {
        let edges: BTreeSet<_> = edges.into_iter().filter(|(j, i)| j != i).collect();
        let mut graph = Self {
            k,
            edges,
            family_heights: vec![None; k],
            height: None,
            in_degree: 0,
            acyclic: false,
        };
        graph.in_degree = (0..k)
            .map(|i| graph.predecessors(FamilyId(i)).count())
            .max()
            .unwrap_or(0);
        if let Some(order) = graph.topological_order() {
            for &i in &order {
                let h = graph
                    .predecessors(i)
                    .map(|j| graph.family_heights[j.0].expect("predecessor first") + 1)
                    .max()
                    .unwrap_or(0);
                graph.family_heights[i.0] = Some(h);
            }
            graph.height = graph
                .family_heights
                .iter()
                .flatten()
                .copied()
                .max()
                .or(Some(0));
            graph.acyclic = true;
        }
        graph
    }

    /// Number of vertices (families).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> impl Iterator<Item = (FamilyId, FamilyId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, from: FamilyId, to: FamilyId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Families `j` with `A_j ≺ A_i`.
    pub fn predecessors(&self, i: FamilyId) -> impl Iterator<Item = FamilyId> + '_ {
        self.edges
            .iter()
            .filter(move |(_, to)| *to == i)
            .map(|(from, _)| *from)
    }

    pub fn successors(&self, j: FamilyId) -> impl Iterator<Item = FamilyId> + '_ {
        self.edges
            .iter()
            .filter(move |(from, _)| *from == j)
            .map(|(_, to)| *to)
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }

    /// `𝔥(A_i)`; `None` when the graph has a cycle.
    pub fn family_height(&self, i: FamilyId) -> Option<usize> {
        self.family_heights[i.0]
    }

    /// `𝔥`; `None` when the graph has a cycle.
    pub fn height(&self) -> Option<usize> {
        self.height
    }

    /// `d`: the maximum in-degree.
    pub fn in_degree(&self) -> usize {
        self.in_degree
    }

    /// Kahn's algorithm, always picking the smallest available index.
    pub fn topological_order(&self) -> Option<Vec<FamilyId>> {
        let mut remaining: Vec<usize> = (0..self.k)
            .map(|i| self.predecessors(FamilyId(i)).count())
            .collect();
        let mut ready: BinaryHeap<Reverse<usize>> = (0..self.k)
            .filter(|&i| remaining[i] == 0)
            .map(Reverse)
            .collect();
        let mut order = Vec::with_capacity(self.k);
        while let Some(Reverse(j)) = ready.pop() {
            order.push(FamilyId(j));
            for i in self.successors(FamilyId(j)) {
                remaining[i.0] -= 1;
                if remaining[i.0] == 0 {
                    ready.push(Reverse(i.0));
                }
            }
        }
        (order.len() == self.k).then_some(order)
    }
}

/// Builds the causality graph from declared reads and the write partition.
pub fn build_causality_graph(alg: &AlgorithmSpec) -> CausalityGraph {
    let schema = alg.schema();
    let mut edges = Vec::new();
    for i in alg.family_ids() {
        for read in alg.family(i).reads().iter() {
            if let Some(j) = schema.writer(read.var) {
                if j != i {
                    edges.push((j, i));
                }
            }
        }
    }
    CausalityGraph::from_edges(alg.k(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: usize) -> FamilyId {
        FamilyId(i)
    }

    #[test]
    fn chain_heights() {
        let g = CausalityGraph::from_edges(3, [(f(0), f(1)), (f(1), f(2))]);
        assert_eq!(g.height(), Some(2));
        assert_eq!(g.in_degree(), 1);
        assert_eq!(g.family_height(f(2)), Some(2));
        assert_eq!(g.topological_order(), Some(vec![f(0), f(1), f(2)]));
    }

    #[test]
    fn ties_follow_declaration_order() {
        let g = CausalityGraph::from_edges(3, [(f(2), f(0))]);
        assert_eq!(g.topological_order(), Some(vec![f(1), f(2), f(0)]));
        let empty = CausalityGraph::from_edges(2, []);
        assert_eq!(empty.topological_order(), Some(vec![f(0), f(1)]));
        assert_eq!(empty.height(), Some(0));
        assert_eq!(empty.in_degree(), 0);
    }

    #[test]
    fn cycles_are_detected() {
        let g = CausalityGraph::from_edges(3, [(f(0), f(1)), (f(1), f(0)), (f(1), f(2))]);
        assert!(!g.is_acyclic());
        assert_eq!(g.height(), None);
        assert_eq!(g.topological_order(), None);
    }

    #[test]
    fn diamond_in_degree() {
        let g =
            CausalityGraph::from_edges(4, [(f(0), f(1)), (f(0), f(2)), (f(1), f(3)), (f(2), f(3))]);
        assert_eq!(g.in_degree(), 2);
        assert_eq!(g.height(), Some(2));
    }
}
