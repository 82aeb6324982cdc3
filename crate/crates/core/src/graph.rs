//! Directed graph primitives: incidence matrices, weak connectivity,
//! spanning trees and fundamental cycle bases.
//!
//! Nodes and edges are 0-based here; the text formats in [`crate::io`] are
//! 1-based. Edge orientation only matters for incidence signs. Connectivity,
//! trees and cycles all treat the graph as undirected.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::rational::{sign, Rational};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("edge {edge} references node {node}, outside 0..{node_count}")]
    NodeOutOfRange {
        edge: usize,
        node: usize,
        node_count: usize,
    },
    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("edge {edge} has an extremity outside the node restriction")]
    EdgeOutsideRestriction { edge: usize },
    #[error("root {root} is not in the node restriction")]
    RootNotInNodes { root: usize },
    #[error("restricted graph is disconnected ({} components)", components.len())]
    Disconnected { components: Vec<BTreeSet<usize>> },
    #[error("spanning tree does not span the restriction")]
    NotSpanning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

impl Edge {
    /// The endpoint opposite to `node`.
    pub fn other(&self, node: usize) -> usize {
        if node == self.tail {
            self.head
        } else {
            self.tail
        }
    }

    /// Incidence coefficient of `node` on this edge: -1 at the tail, +1 at the
    /// head, 0 elsewhere.
    pub fn incidence(&self, node: usize) -> i8 {
        if node == self.tail {
            -1
        } else if node == self.head {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    node_count: usize,
    edges: Vec<Edge>,
}

impl Digraph {
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::NoNodes);
        }
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, (tail, head))| {
                for node in [tail, head] {
                    if node >= node_count {
                        return Err(GraphError::NodeOutOfRange {
                            edge: id,
                            node,
                            node_count,
                        });
                    }
                }
                if tail == head {
                    return Err(GraphError::SelfLoop {
                        edge: id,
                        node: tail,
                    });
                }
                Ok(Edge { tail, head })
            })
            .collect::<Result<_, _>>()?;
        Ok(Digraph { node_count, edges })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Copy of the graph with the listed edges reversed.
    pub fn with_flipped(&self, flipped: &BTreeSet<usize>) -> Digraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| {
                if flipped.contains(&id) {
                    Edge {
                        tail: e.head,
                        head: e.tail,
                    }
                } else {
                    *e
                }
            })
            .collect();
        Digraph {
            node_count: self.node_count,
            edges,
        }
    }

    pub fn all_nodes(&self) -> BTreeSet<usize> {
        (0..self.node_count).collect()
    }

    pub fn all_edges(&self) -> BTreeSet<usize> {
        (0..self.edges.len()).collect()
    }

    /// Adjacency lists `node -> [(edge, neighbor)]` of the restriction, edges
    /// in ascending id order.
    fn adjacency(
        &self,
        nodes: &BTreeSet<usize>,
        edges: &BTreeSet<usize>,
    ) -> Result<BTreeMap<usize, Vec<(usize, usize)>>, GraphError> {
        let mut adj: BTreeMap<usize, Vec<(usize, usize)>> =
            nodes.iter().map(|&n| (n, Vec::new())).collect();
        for &id in edges {
            let e = self.edges[id];
            if !nodes.contains(&e.tail) || !nodes.contains(&e.head) {
                return Err(GraphError::EdgeOutsideRestriction { edge: id });
            }
            adj.get_mut(&e.tail).unwrap().push((id, e.head));
            adj.get_mut(&e.head).unwrap().push((id, e.tail));
        }
        Ok(adj)
    }
}

/// Edge-node incidence matrix: row `i` has -1 at the tail of edge `i` and +1
/// at its head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    node_count: usize,
    rows: Vec<Edge>,
}

impl IncidenceMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.node_count
    }

    pub fn entry(&self, edge: usize, node: usize) -> i8 {
        self.rows[edge].incidence(node)
    }

    /// The two nonzeros of row `edge`, as `[(tail, -1), (head, +1)]`.
    pub fn row(&self, edge: usize) -> [(usize, i8); 2] {
        let e = self.rows[edge];
        [(e.tail, -1), (e.head, 1)]
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(self.rows.len(), self.node_count);
        for (i, _) in self.rows.iter().enumerate() {
            for (node, s) in self.row(i) {
                m.set(i, node, sign(s));
            }
        }
        m
    }

    /// Dense submatrix with rows `edges` and columns `nodes`, both ascending.
    pub fn restricted_dense(
        &self,
        nodes: &BTreeSet<usize>,
        edges: &BTreeSet<usize>,
    ) -> DenseMatrix {
        let nodes: Vec<usize> = nodes.iter().copied().collect();
        let edges: Vec<usize> = edges.iter().copied().collect();
        DenseMatrix::from_fn(edges.len(), nodes.len(), |r, c| {
            sign(self.entry(edges[r], nodes[c]))
        })
    }
}

pub fn build_incidence(g: &Digraph) -> IncidenceMatrix {
    IncidenceMatrix {
        node_count: g.node_count,
        rows: g.edges.clone(),
    }
}

/// Weakly connected components of the restriction, each sorted, listed by
/// smallest member.
pub fn connected_components(
    g: &Digraph,
    nodes: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
) -> Result<Vec<BTreeSet<usize>>, GraphError> {
    let adj = g.adjacency(nodes, edges)?;
    let mut seen = BTreeSet::new();
    let mut components = Vec::new();
    for &start in nodes {
        if !seen.insert(start) {
            continue;
        }
        let mut component = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[&v] {
                if seen.insert(w) {
                    component.insert(w);
                    queue.push_back(w);
                }
            }
        }
        components.push(component);
    }
    Ok(components)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    pub tree_edges: BTreeSet<usize>,
    /// `node -> (parent node, connecting edge)` for every non-root node.
    pub parent: BTreeMap<usize, (usize, usize)>,
    /// Nodes in breadth-first order, root first.
    pub order: Vec<usize>,
}

impl SpanningTree {
    fn depth(&self, mut node: usize) -> usize {
        let mut d = 0;
        while let Some(&(p, _)) = self.parent.get(&node) {
            node = p;
            d += 1;
        }
        d
    }
}

/// Breadth-first spanning tree from `root`, scanning incident edges in
/// ascending id order.
pub fn spanning_tree(
    g: &Digraph,
    nodes: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
    root: usize,
) -> Result<SpanningTree, GraphError> {
    if !nodes.contains(&root) {
        return Err(GraphError::RootNotInNodes { root });
    }
    let adj = g.adjacency(nodes, edges)?;
    let mut tree = SpanningTree {
        root,
        tree_edges: BTreeSet::new(),
        parent: BTreeMap::new(),
        order: vec![root],
    };
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(id, w) in &adj[&v] {
            if w != root && !tree.parent.contains_key(&w) {
                tree.parent.insert(w, (v, id));
                tree.tree_edges.insert(id);
                tree.order.push(w);
                queue.push_back(w);
            }
        }
    }
    if tree.order.len() != nodes.len() {
        return Err(GraphError::Disconnected {
            components: connected_components(g, nodes, edges)?,
        });
    }
    Ok(tree)
}

/// A signed edge combination whose incidence image vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub coefficients: BTreeMap<usize, i8>,
}

impl Cycle {
    /// `cᵀ G` restricted to the nodes touched by the cycle; all zero for a
    /// genuine cycle.
    pub fn boundary(&self, g: &Digraph) -> BTreeMap<usize, i64> {
        let mut acc = BTreeMap::new();
        for (&id, &c) in &self.coefficients {
            let e = g.edge(id);
            *acc.entry(e.tail).or_insert(0) -= c as i64;
            *acc.entry(e.head).or_insert(0) += c as i64;
        }
        acc
    }

    pub fn annihilates_incidence(&self, g: &Digraph) -> bool {
        self.boundary(g).values().all(|&v| v == 0)
    }

    pub fn to_rational(&self) -> BTreeMap<usize, Rational> {
        self.coefficients
            .iter()
            .map(|(&e, &c)| (e, sign(c)))
            .collect()
    }
}

/// One cycle per non-tree edge, in ascending order of that edge.
///
/// The non-tree edge `e = (t, h)` carries +1. The tree path from `h` back to
/// `t` carries +1 on edges walked tail to head and -1 on edges walked against
/// their orientation.
pub fn fundamental_cycles(
    g: &Digraph,
    nodes: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
    tree: &SpanningTree,
) -> Result<Vec<Cycle>, GraphError> {
    let spans = tree.order.len() == nodes.len()
        && tree.order.iter().all(|n| nodes.contains(n))
        && tree.tree_edges.is_subset(edges);
    if !spans {
        return Err(GraphError::NotSpanning);
    }
    let mut cycles = Vec::new();
    for &id in edges.difference(&tree.tree_edges) {
        let e = g.edge(id);
        if !nodes.contains(&e.tail) || !nodes.contains(&e.head) {
            return Err(GraphError::EdgeOutsideRestriction { edge: id });
        }
        let mut coefficients = BTreeMap::from([(id, 1i8)]);

        // climb from both ends to the lowest common ancestor
        let (mut up, mut down) = (e.head, e.tail);
        let (mut du, mut dd) = (tree.depth(up), tree.depth(down));
        let mut down_steps = Vec::new();
        while up != down {
            if du >= dd {
                let (p, te) = tree.parent[&up];
                let fwd = g.edge(te).tail == up;
                coefficients.insert(te, if fwd { 1 } else { -1 });
                up = p;
                du -= 1;
            } else {
                let (p, te) = tree.parent[&down];
                down_steps.push((p, te));
                down = p;
                dd -= 1;
            }
        }
        // walk back down towards the tail
        for (p, te) in down_steps {
            let fwd = g.edge(te).tail == p;
            coefficients.insert(te, if fwd { 1 } else { -1 });
        }
        cycles.push(Cycle { coefficients });
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn triangle() -> Digraph {
        // e1=(1,2), e2=(2,3), e3=(1,3), 0-based
        Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(Digraph::new(0, []), Err(GraphError::NoNodes));
        assert_eq!(
            Digraph::new(2, [(0, 0)]),
            Err(GraphError::SelfLoop { edge: 0, node: 0 })
        );
        assert!(matches!(
            Digraph::new(2, [(0, 2)]),
            Err(GraphError::NodeOutOfRange { node: 2, .. })
        ));
        // parallel edges are fine
        assert!(Digraph::new(2, [(0, 1), (0, 1)]).is_ok());
    }

    #[test]
    fn incidence_of_path() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let gm = build_incidence(&g);
        assert_eq!(gm.row(0), [(0, -1), (1, 1)]);
        assert_eq!(gm.row(1), [(1, -1), (2, 1)]);
        assert_eq!(gm.entry(0, 2), 0);

        let single = build_incidence(&Digraph::new(2, [(0, 1)]).unwrap());
        assert_eq!(single.nrows(), 1);
        assert_eq!(single.row(0), [(0, -1), (1, 1)]);
    }

    #[test]
    fn reversing_an_edge_negates_its_row() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let flipped = g.with_flipped(&set(&[0]));
        let a = build_incidence(&g).to_sparse();
        let mut b = build_incidence(&flipped).to_sparse();
        b.negate_row(0);
        assert_eq!(a, b);
    }

    #[test]
    fn components() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let nodes = set(&[0, 1, 2]);
        assert_eq!(
            connected_components(&g, &nodes, &set(&[0])).unwrap(),
            vec![set(&[0, 1]), set(&[2])]
        );
        assert_eq!(
            connected_components(&g, &nodes, &set(&[0, 1])).unwrap(),
            vec![set(&[0, 1, 2])]
        );
        assert_eq!(
            connected_components(&g, &set(&[0, 1]), &set(&[])).unwrap(),
            vec![set(&[0]), set(&[1])]
        );
        assert!(connected_components(&g, &set(&[]), &set(&[]))
            .unwrap()
            .is_empty());
        assert_eq!(
            connected_components(&g, &set(&[0, 1]), &set(&[1])),
            Err(GraphError::EdgeOutsideRestriction { edge: 1 })
        );
    }

    #[test]
    fn bfs_tree_of_triangle() {
        let g = triangle();
        let t = spanning_tree(&g, &g.all_nodes(), &g.all_edges(), 0).unwrap();
        assert_eq!(t.tree_edges, set(&[0, 2]));
        assert_eq!(t.parent[&1], (0, 0));
        assert_eq!(t.parent[&2], (0, 2));
        assert_eq!(t.order, vec![0, 1, 2]);
    }

    #[test]
    fn trivial_trees() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let single = spanning_tree(&g, &set(&[0]), &set(&[]), 0).unwrap();
        assert!(single.tree_edges.is_empty());
        let path = spanning_tree(&g, &g.all_nodes(), &g.all_edges(), 2).unwrap();
        assert_eq!(path.tree_edges, set(&[0, 1]));
        assert!(matches!(
            spanning_tree(&g, &g.all_nodes(), &set(&[0]), 0),
            Err(GraphError::Disconnected { .. })
        ));
        assert_eq!(
            spanning_tree(&g, &set(&[0, 1]), &set(&[0]), 2),
            Err(GraphError::RootNotInNodes { root: 2 })
        );
    }

    #[test]
    fn triangle_cycle_signs() {
        let g = triangle();
        let t = spanning_tree(&g, &g.all_nodes(), &g.all_edges(), 0).unwrap();
        let cycles = fundamental_cycles(&g, &g.all_nodes(), &g.all_edges(), &t).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(
            cycles[0].coefficients,
            BTreeMap::from([(1, 1), (2, -1), (0, 1)])
        );
        assert!(cycles[0].annihilates_incidence(&g));
    }

    #[test]
    fn parallel_edge_cycle() {
        let g = Digraph::new(2, [(0, 1), (0, 1)]).unwrap();
        let t = spanning_tree(&g, &g.all_nodes(), &g.all_edges(), 0).unwrap();
        assert_eq!(t.tree_edges, set(&[0]));
        let cycles = fundamental_cycles(&g, &g.all_nodes(), &g.all_edges(), &t).unwrap();
        assert_eq!(cycles[0].coefficients, BTreeMap::from([(1, 1), (0, -1)]));
        assert!(cycles[0].annihilates_incidence(&g));
    }

    #[test]
    fn tree_has_no_cycles() {
        let g = Digraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let t = spanning_tree(&g, &g.all_nodes(), &g.all_edges(), 1).unwrap();
        assert!(fundamental_cycles(&g, &g.all_nodes(), &g.all_edges(), &t)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn cycle_requires_spanning_tree() {
        let g = triangle();
        let t = spanning_tree(&g, &set(&[0, 1]), &set(&[0]), 0).unwrap();
        assert_eq!(
            fundamental_cycles(&g, &g.all_nodes(), &g.all_edges(), &t),
            Err(GraphError::NotSpanning)
        );
    }
}
