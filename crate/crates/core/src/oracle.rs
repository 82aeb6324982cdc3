//! Brute-force cross-checks by dense exact elimination.
//!
//! The oracle solves row `i` of `Gʰ α = β G^H` directly: one equation per
//! coarse node, one unknown per coarse edge `e = (m, n)` whose `I_e` contains
//! `i`, right-hand side `α_qn - α_pn`. It never builds spanning trees and
//! reads only the fine graph, the aggregates, α and the coarse graph.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::aggregation::{Aggregation, NodalProlongation};
use crate::dense::DenseMatrix;
use crate::graph::{Cycle, Digraph};
use crate::rational::{sign, Rational};

/// Largest `|C̃_i|` the oracle accepts.
pub const MAX_ORACLE_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("fine edge {} touches {size} coarse nodes (limit {MAX_ORACLE_NODES})", .fine_edge + 1)]
    SizeLimit { fine_edge: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// One solution, keyed by coarse edge.
    Solvable(BTreeMap<usize, Rational>),
    Unsolvable,
}

impl Verdict {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Verdict::Solvable(_))
    }
}

/// Verdict for every fine edge, in order.
pub fn oracle_solve(
    fine: &Digraph,
    agg: &Aggregation,
    alpha: &NodalProlongation,
    coarse: &Digraph,
) -> Result<Vec<Verdict>, OracleError> {
    (0..fine.edge_count())
        .map(|i| oracle_row(fine, agg, alpha, coarse, i))
        .collect()
}

pub fn oracle_row(
    fine: &Digraph,
    agg: &Aggregation,
    alpha: &NodalProlongation,
    coarse: &Digraph,
    i: usize,
) -> Result<Verdict, OracleError> {
    let edge = fine.edge(i);
    let (p, q) = (edge.tail, edge.head);
    let touches = |n: usize| agg.set(n).contains(&p) || agg.set(n).contains(&q);
    let size = (0..agg.coarse_node_count()).filter(|&n| touches(n)).count();
    if size > MAX_ORACLE_NODES {
        return Err(OracleError::SizeLimit { fine_edge: i, size });
    }

    let unknowns: Vec<usize> = coarse
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| touches(e.tail) && touches(e.head))
        .map(|(id, _)| id)
        .collect();
    let nodes = coarse.node_count();
    let system = DenseMatrix::from_fn(nodes, unknowns.len(), |n, k| {
        sign(coarse.edge(unknowns[k]).incidence(n))
    });
    let rhs: Vec<Rational> = (0..nodes)
        .map(|n| alpha.get(q, n) - alpha.get(p, n))
        .collect();
    Ok(match system.solve(&rhs) {
        Some(x) => Verdict::Solvable(
            unknowns
                .into_iter()
                .zip(x)
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        ),
        None => Verdict::Unsolvable,
    })
}

/// Nullity of the transposed incidence matrix of the restriction, i.e. the
/// dimension of its cycle space, by dense rank.
pub fn cycle_space_dimension(
    g: &Digraph,
    nodes: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
) -> usize {
    let incidence = crate::graph::build_incidence(g).restricted_dense(nodes, edges);
    edges.len() - incidence.transpose().rank()
}

/// Whether `vector` is a rational combination of `cycles`.
pub fn in_cycle_span(cycles: &[Cycle], vector: &BTreeMap<usize, Rational>) -> bool {
    let support: BTreeSet<usize> = cycles
        .iter()
        .flat_map(|c| c.coefficients.keys().copied())
        .chain(vector.iter().filter(|(_, v)| !v.is_zero()).map(|(&e, _)| e))
        .collect();
    let support: Vec<usize> = support.into_iter().collect();
    let z = DenseMatrix::from_fn(support.len(), cycles.len(), |r, j| {
        sign(
            cycles[j]
                .coefficients
                .get(&support[r])
                .copied()
                .unwrap_or(0),
        )
    });
    let rhs: Vec<Rational> = support
        .iter()
        .map(|e| vector.get(e).cloned().unwrap_or_else(Rational::zero))
        .collect();
    z.solve(&rhs).is_some()
}
