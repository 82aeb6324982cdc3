//! Coarse topology derived from an aggregation of a fine digraph.
//!
//! For coarse node `n`, `C_n` holds the fine edges with an extremity in
//! `L_n`. For fine edge `i`, `C̃_i` is the set of coarse nodes whose `C`
//! contains `i`. For a coarse edge `e = (m, n)`, `I_e = C_m ∩ C_n` holds the
//! fine edges allowed to contribute to `e`, and `Ĩ_i` is its reciprocal.
//! The induced subgraph `S^{H,i}` is the coarse graph restricted to `C̃_i`;
//! its edges are exactly `Ĩ_i`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::aggregation::Aggregation;
use crate::graph::{connected_components, Digraph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("aggregation has {aggregation} fine nodes but the fine graph has {graph}")]
    FineNodeCountMismatch { aggregation: usize, graph: usize },
    #[error("aggregation has {aggregation} coarse nodes but the coarse graph has {graph}")]
    CoarseNodeCountMismatch { aggregation: usize, graph: usize },
    #[error("C̃ of fine edge {} disagrees with L̃_p ∪ L̃_q", .0 + 1)]
    ReciprocalMismatch(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type IndexSets = Vec<BTreeSet<usize>>;

/// `(C, C̃)`: fine edges per coarse node and coarse nodes per fine edge.
///
/// `C̃` is obtained by inverting `C` and cross-checked against
/// `L̃_p ∪ L̃_q`.
pub fn compute_c(
    agg: &Aggregation,
    fine: &Digraph,
) -> Result<(IndexSets, IndexSets), TopologyError> {
    if agg.fine_node_count() != fine.node_count() {
        return Err(TopologyError::FineNodeCountMismatch {
            aggregation: agg.fine_node_count(),
            graph: fine.node_count(),
        });
    }
    let c: IndexSets = agg
        .sets()
        .iter()
        .map(|set| {
            fine.edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| set.contains(&e.tail) || set.contains(&e.head))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut c_tilde = vec![BTreeSet::new(); fine.edge_count()];
    for (n, edges) in c.iter().enumerate() {
        for &i in edges {
            c_tilde[i].insert(n);
        }
    }
    for (i, e) in fine.edges().iter().enumerate() {
        let union: BTreeSet<usize> = agg
            .reciprocal(e.tail)
            .union(agg.reciprocal(e.head))
            .copied()
            .collect();
        if union != c_tilde[i] {
            return Err(TopologyError::ReciprocalMismatch(i));
        }
    }
    Ok((c, c_tilde))
}

/// Coarse digraph with one edge `m -> n`, `m < n`, for every pair of coarse
/// nodes sharing a fine edge (`C_m ∩ C_n ≠ ∅`). Edges are numbered in
/// lexicographic `(m, n)` order.
pub fn build_coarse_graph(agg: &Aggregation, c_tilde: &[BTreeSet<usize>]) -> Digraph {
    let mut pairs = BTreeSet::new();
    for nodes in c_tilde {
        let nodes: Vec<usize> = nodes.iter().copied().collect();
        for (k, &m) in nodes.iter().enumerate() {
            for &n in &nodes[k + 1..] {
                pairs.insert((m, n));
            }
        }
    }
    Digraph::new(agg.coarse_node_count(), pairs).expect("pairs are ordered and in range")
}

/// `(I, Ĩ, F̃)` for a coarse graph.
pub fn compute_i(
    coarse: &Digraph,
    c: &[BTreeSet<usize>],
    fine_edge_count: usize,
) -> (IndexSets, IndexSets, BTreeSet<usize>) {
    let i_sets: IndexSets = coarse
        .edges()
        .iter()
        .map(|e| c[e.tail].intersection(&c[e.head]).copied().collect())
        .collect();
    let mut i_tilde = vec![BTreeSet::new(); fine_edge_count];
    for (e, fine_edges) in i_sets.iter().enumerate() {
        for &i in fine_edges {
            i_tilde[i].insert(e);
        }
    }
    let f_tilde = (0..fine_edge_count)
        .filter(|&i| !i_tilde[i].is_empty())
        .collect();
    (i_sets, i_tilde, f_tilde)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseTopology {
    coarse: Digraph,
    c: IndexSets,
    c_tilde: IndexSets,
    i: IndexSets,
    i_tilde: IndexSets,
    f_tilde: BTreeSet<usize>,
    induced_edge_mismatches: Vec<usize>,
}

impl CoarseTopology {
    /// Topology over the default coarse graph.
    pub fn build(agg: &Aggregation, fine: &Digraph) -> Result<Self, TopologyError> {
        let (c, c_tilde) = compute_c(agg, fine)?;
        let coarse = build_coarse_graph(agg, &c_tilde);
        Ok(Self::assemble(coarse, c, c_tilde, fine.edge_count()))
    }

    /// Topology over a user-supplied coarse graph. Connectivity of the
    /// induced subgraphs is not assumed.
    pub fn with_coarse_graph(
        agg: &Aggregation,
        fine: &Digraph,
        coarse: Digraph,
    ) -> Result<Self, TopologyError> {
        if coarse.node_count() != agg.coarse_node_count() {
            return Err(TopologyError::CoarseNodeCountMismatch {
                aggregation: agg.coarse_node_count(),
                graph: coarse.node_count(),
            });
        }
        let (c, c_tilde) = compute_c(agg, fine)?;
        Ok(Self::assemble(coarse, c, c_tilde, fine.edge_count()))
    }

    fn assemble(coarse: Digraph, c: IndexSets, c_tilde: IndexSets, fine_edges: usize) -> Self {
        let (i, i_tilde, f_tilde) = compute_i(&coarse, &c, fine_edges);
        let mut topo = CoarseTopology {
            coarse,
            c,
            c_tilde,
            i,
            i_tilde,
            f_tilde,
            induced_edge_mismatches: Vec::new(),
        };
        topo.induced_edge_mismatches = topo
            .f_tilde
            .iter()
            .copied()
            .filter(|&i| topo.induced_edges(i) != topo.i_tilde[i])
            .collect();
        topo
    }

    pub fn coarse_graph(&self) -> &Digraph {
        &self.coarse
    }

    pub fn fine_edge_count(&self) -> usize {
        self.c_tilde.len()
    }

    /// `C_n`.
    pub fn c(&self, n: usize) -> &BTreeSet<usize> {
        &self.c[n]
    }

    /// `C̃_i`.
    pub fn c_tilde(&self, i: usize) -> &BTreeSet<usize> {
        &self.c_tilde[i]
    }

    /// `I_e`.
    pub fn i(&self, e: usize) -> &BTreeSet<usize> {
        &self.i[e]
    }

    /// `Ĩ_i`.
    pub fn i_tilde(&self, i: usize) -> &BTreeSet<usize> {
        &self.i_tilde[i]
    }

    /// `F̃`: fine edges contributing to at least one coarse edge.
    pub fn f_tilde(&self) -> &BTreeSet<usize> {
        &self.f_tilde
    }

    /// Fine edges of `F̃` whose `Ĩ_i` differs from the edge set induced by
    /// `C̃_i`. Always empty unless the index sets were tampered with.
    pub fn induced_edge_mismatches(&self) -> &[usize] {
        &self.induced_edge_mismatches
    }

    /// Coarse edges with both extremities in `C̃_i`, computed from the
    /// coarse graph alone.
    pub fn induced_edges(&self, i: usize) -> BTreeSet<usize> {
        let nodes = &self.c_tilde[i];
        self.coarse
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| nodes.contains(&e.tail) && nodes.contains(&e.head))
            .map(|(e, _)| e)
            .collect()
    }

    pub fn induced_subgraph(&self, i: usize) -> InducedSubgraph {
        let nodes = self.c_tilde[i].clone();
        let edges = self.i_tilde[i].clone();
        let components = connected_components(&self.coarse, &nodes, &edges)
            .expect("Ĩ_i only joins nodes of C̃_i");
        InducedSubgraph {
            fine_edge: i,
            connected: components.len() == 1,
            nodes,
            edges,
            components,
        }
    }
}

/// `S^{H,i}` with its weak components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub fine_edge: usize,
    /// `C̃_i`.
    pub nodes: BTreeSet<usize>,
    /// `Ĩ_i`.
    pub edges: BTreeSet<usize>,
    pub connected: bool,
    pub components: Vec<BTreeSet<usize>>,
}

impl InducedSubgraph {
    /// Dimension of the cycle space, `|Ĩ_i| - |C̃_i| + #components`.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components.len() - self.nodes.len()
    }
}

/// One record per fine edge, in fine edge order.
pub fn induced_subgraphs(topology: &CoarseTopology) -> Vec<InducedSubgraph> {
    (0..topology.fine_edge_count())
        .map(|i| topology.induced_subgraph(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::{build_reciprocal, sets_from_one_based};

    fn b(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn path4() -> (Aggregation, Digraph) {
        let agg = build_reciprocal(sets_from_one_based(&[&[1, 2, 3], &[2, 3, 4]]), 4).unwrap();
        let g = Digraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        (agg, g)
    }

    #[test]
    fn example_sets_reciprocals() {
        let agg = build_reciprocal(
            sets_from_one_based(&[
                &[1, 2, 3, 4, 5, 6, 7],
                &[5, 6, 8, 9, 13, 14],
                &[7, 8, 10, 11, 12],
            ]),
            14,
        )
        .unwrap();
        // a fine edge 7 -> 8 (1-based)
        let g = Digraph::new(14, [(6, 7)]).unwrap();
        let (_, c_tilde) = compute_c(&agg, &g).unwrap();
        assert_eq!(c_tilde[0], b(&[0, 1, 2]));
    }

    #[test]
    fn identity_aggregation_reproduces_graph() {
        let g = Digraph::new(3, [(1, 0), (1, 2), (0, 1)]).unwrap();
        let agg = build_reciprocal((0..3).map(|n| b(&[n])).collect(), 3).unwrap();
        let topo = CoarseTopology::build(&agg, &g).unwrap();
        assert_eq!(topo.c_tilde(0), &b(&[0, 1]));
        assert_eq!(topo.c(1), &b(&[0, 1, 2]));
        // parallel (1,0)/(0,1) merge; orientation normalized to low -> high
        let coarse = topo.coarse_graph();
        assert_eq!(coarse.edge_count(), 2);
        assert_eq!((coarse.edge(0).tail, coarse.edge(0).head), (0, 1));
        assert_eq!((coarse.edge(1).tail, coarse.edge(1).head), (1, 2));
        assert_eq!(topo.i(0), &b(&[0, 2]));
        assert_eq!(topo.f_tilde(), &b(&[0, 1, 2]));
    }

    #[test]
    fn single_membership_edge_not_in_f_tilde() {
        let agg = build_reciprocal(sets_from_one_based(&[&[1, 2], &[3]]), 3).unwrap();
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let topo = CoarseTopology::build(&agg, &g).unwrap();
        assert_eq!(topo.c_tilde(0), &b(&[0]));
        assert!(!topo.f_tilde().contains(&0));
        let sub = topo.induced_subgraph(0);
        assert!(sub.connected);
        assert_eq!(sub.components, vec![b(&[0])]);
    }

    #[test]
    fn path4_index_sets() {
        let (agg, g) = path4();
        let topo = CoarseTopology::build(&agg, &g).unwrap();
        assert_eq!(topo.c(0), &b(&[0, 1, 2]));
        assert_eq!(topo.c(1), &b(&[0, 1, 2]));
        assert_eq!(topo.coarse_graph().edge_count(), 1);
        assert_eq!(topo.i(0), &b(&[0, 1, 2]));
        assert!(topo.induced_edge_mismatches().is_empty());
    }

    #[test]
    fn disjoint_path_index_sets() {
        let agg = build_reciprocal(sets_from_one_based(&[&[1, 2], &[3, 4]]), 4).unwrap();
        let g = Digraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let topo = CoarseTopology::build(&agg, &g).unwrap();
        assert_eq!(topo.i(0), &b(&[1]));
        assert_eq!(topo.f_tilde(), &b(&[1]));
    }

    #[test]
    fn no_shared_nodes_no_coarse_edge() {
        let agg = build_reciprocal(sets_from_one_based(&[&[1, 2], &[3, 4]]), 4).unwrap();
        let g = Digraph::new(4, [(0, 1), (2, 3)]).unwrap();
        let topo = CoarseTopology::build(&agg, &g).unwrap();
        assert_eq!(topo.coarse_graph().edge_count(), 0);
        assert!(topo.f_tilde().is_empty());
    }

    #[test]
    fn edgeless_supplied_coarse_graph_is_disconnected() {
        let agg = build_reciprocal(vec![b(&[0]), b(&[1])], 2).unwrap();
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        let coarse = Digraph::new(2, []).unwrap();
        let topo = CoarseTopology::with_coarse_graph(&agg, &g, coarse).unwrap();
        let sub = topo.induced_subgraph(0);
        assert!(!sub.connected);
        assert_eq!(sub.components, vec![b(&[0]), b(&[1])]);
    }

    #[test]
    fn size_mismatches() {
        let agg = build_reciprocal(vec![b(&[0]), b(&[1])], 2).unwrap();
        let g = Digraph::new(3, [(0, 1)]).unwrap();
        assert!(matches!(
            CoarseTopology::build(&agg, &g),
            Err(TopologyError::FineNodeCountMismatch { .. })
        ));
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(matches!(
            CoarseTopology::with_coarse_graph(&agg, &g, Digraph::new(3, []).unwrap()),
            Err(TopologyError::CoarseNodeCountMismatch { .. })
        ));
    }
}
