//! Overlapping aggregates of fine nodes and the nodal prolongation α.
//!
//! Aggregate `n` is the set `L_n` of fine nodes allowed to contribute to
//! coarse node `n`. The aggregates must cover every fine node and may
//! overlap. α is a fine-by-coarse matrix whose rows sum to one and whose
//! nonzeros stay inside the aggregates.
//!
//! Error variants store 0-based indices and display them 1-based, matching
//! the text formats.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::Digraph;
use crate::rational::{format_rational, Rational};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AggregationError {
    #[error("at least one aggregate is required")]
    NoAggregates,
    #[error("aggregate {} is empty", .0 + 1)]
    EmptyAggregate(usize),
    #[error("aggregate {} contains fine node {}, outside 1..={fine_node_count}", .aggregate + 1, .node + 1)]
    NodeOutOfRange {
        aggregate: usize,
        node: usize,
        fine_node_count: usize,
    },
    #[error("aggregates do not cover fine nodes {}", one_based(.uncovered))]
    CoverViolation { uncovered: Vec<usize> },
    #[error("entry ({}, {}) outside the {rows}x{cols} prolongation", .row + 1, .col + 1)]
    EntryOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry ({}, {})", .0 + 1, .1 + 1)]
    DuplicateEntry(usize, usize),
    #[error("row {} sums to {} instead of 1", .row + 1, format_rational(.sum))]
    RowSumViolation { row: usize, sum: Rational },
    #[error("nonzero entry ({}, {}) but fine node {} is not in aggregate {}", .0 + 1, .1 + 1, .0 + 1, .1 + 1)]
    SupportViolation(usize, usize),
    #[error("component is empty")]
    EmptyComponent,
    #[error("coarse node {} of the component is not in L̃_p ∪ L̃_q", .0 + 1)]
    ComponentOutsideEdge(usize),
    #[error("component equals L̃_p ∪ L̃_q; no counterexample exists for it")]
    NotStrictSubset,
}

fn one_based(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The cover `(L_n)` together with its reciprocal `L̃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregation {
    fine_node_count: usize,
    sets: Vec<BTreeSet<usize>>,
    reciprocal: Vec<BTreeSet<usize>>,
}

impl Aggregation {
    pub fn fine_node_count(&self) -> usize {
        self.fine_node_count
    }

    pub fn coarse_node_count(&self) -> usize {
        self.sets.len()
    }

    /// `L_n`: fine nodes contributing to coarse node `n`.
    pub fn set(&self, n: usize) -> &BTreeSet<usize> {
        &self.sets[n]
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    /// `L̃_p`: coarse nodes fine node `p` contributes to.
    pub fn reciprocal(&self, p: usize) -> &BTreeSet<usize> {
        &self.reciprocal[p]
    }

    /// Recovers `(L_n)` from `L̃`.
    pub fn expand_reciprocal(&self) -> Vec<BTreeSet<usize>> {
        let mut sets = vec![BTreeSet::new(); self.sets.len()];
        for (p, coarse) in self.reciprocal.iter().enumerate() {
            for &n in coarse {
                sets[n].insert(p);
            }
        }
        sets
    }
}

pub fn build_reciprocal(
    sets: Vec<BTreeSet<usize>>,
    fine_node_count: usize,
) -> Result<Aggregation, AggregationError> {
    if sets.is_empty() {
        return Err(AggregationError::NoAggregates);
    }
    let mut reciprocal = vec![BTreeSet::new(); fine_node_count];
    for (n, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(AggregationError::EmptyAggregate(n));
        }
        for &p in set {
            if p >= fine_node_count {
                return Err(AggregationError::NodeOutOfRange {
                    aggregate: n,
                    node: p,
                    fine_node_count,
                });
            }
            reciprocal[p].insert(n);
        }
    }
    let uncovered: Vec<usize> = (0..fine_node_count)
        .filter(|&p| reciprocal[p].is_empty())
        .collect();
    if !uncovered.is_empty() {
        return Err(AggregationError::CoverViolation { uncovered });
    }
    Ok(Aggregation {
        fine_node_count,
        sets,
        reciprocal,
    })
}

/// α: rows indexed by fine nodes, columns by coarse nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalProlongation {
    matrix: SparseMatrix,
}

impl NodalProlongation {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn get(&self, p: usize, n: usize) -> Rational {
        self.matrix.get(p, n)
    }

    /// Checks the partition of unity and the support restriction.
    pub fn validate(&self, agg: &Aggregation) -> Result<(), AggregationError> {
        validate_matrix(agg, &self.matrix)
    }
}

fn validate_matrix(agg: &Aggregation, m: &SparseMatrix) -> Result<(), AggregationError> {
    assert_eq!(
        (m.nrows(), m.ncols()),
        (agg.fine_node_count(), agg.coarse_node_count())
    );
    for p in 0..m.nrows() {
        for &n in m.row(p).keys() {
            if !agg.sets[n].contains(&p) {
                return Err(AggregationError::SupportViolation(p, n));
            }
        }
        let sum = m.row_sum(p);
        if !sum.is_one() {
            return Err(AggregationError::RowSumViolation { row: p, sum });
        }
    }
    Ok(())
}

/// Uniform split: `α_pn = 1/|L̃_p|` for `n ∈ L̃_p`.
pub fn default_alpha(agg: &Aggregation) -> NodalProlongation {
    let mut matrix = SparseMatrix::zeros(agg.fine_node_count(), agg.coarse_node_count());
    for (p, coarse) in agg.reciprocal.iter().enumerate() {
        let weight = Rational::new(1.into(), coarse.len().into());
        for &n in coarse {
            matrix.set(p, n, weight.clone());
        }
    }
    NodalProlongation { matrix }
}

/// Assembles α from `(p, n, value)` triplets and validates it.
pub fn load_alpha(
    agg: &Aggregation,
    entries: impl IntoIterator<Item = (usize, usize, Rational)>,
) -> Result<NodalProlongation, AggregationError> {
    let (rows, cols) = (agg.fine_node_count(), agg.coarse_node_count());
    let mut matrix = SparseMatrix::zeros(rows, cols);
    let mut seen = BTreeSet::new();
    for (p, n, value) in entries {
        if p >= rows || n >= cols {
            return Err(AggregationError::EntryOutOfRange {
                row: p,
                col: n,
                rows,
                cols,
            });
        }
        if !seen.insert((p, n)) {
            return Err(AggregationError::DuplicateEntry(p, n));
        }
        matrix.set(p, n, value);
    }
    validate_matrix(agg, &matrix)?;
    Ok(NodalProlongation { matrix })
}

/// An α for which fine edge `edge = (p, q)` has a nonzero sum of
/// `α_qn - α_pn` over `component`.
///
/// Rows `p` and `q` are each concentrated on one coarse node so that the
/// component sums are `(1, 0)` or `(0, 1)`; every other row is the uniform
/// default.
pub fn counterexample_alpha(
    agg: &Aggregation,
    fine: &Digraph,
    edge: usize,
    component: &BTreeSet<usize>,
) -> Result<NodalProlongation, AggregationError> {
    let e = fine.edge(edge);
    let (lp, lq) = (agg.reciprocal(e.tail), agg.reciprocal(e.head));
    let union: BTreeSet<usize> = lp.union(lq).copied().collect();
    if component.is_empty() {
        return Err(AggregationError::EmptyComponent);
    }
    if let Some(&n) = component.iter().find(|n| !union.contains(n)) {
        return Err(AggregationError::ComponentOutsideEdge(n));
    }
    if component.len() == union.len() {
        return Err(AggregationError::NotStrictSubset);
    }

    let inside = |set: &BTreeSet<usize>| set.intersection(component).next().copied();
    let outside = |set: &BTreeSet<usize>| set.difference(component).next().copied();
    // (1, 0): q fully inside, p fully outside; otherwise (0, 1)
    let (p_col, q_col) = match (outside(lp), inside(lq)) {
        (Some(np), Some(nq)) => (np, nq),
        _ => {
            let np = inside(lp).expect("component meets L̃_p when (1, 0) is impossible");
            let nq = outside(lq).expect("L̃_q leaves the component when (1, 0) is impossible");
            (np, nq)
        }
    };

    let mut matrix = default_alpha(agg).matrix;
    for (row, col) in [(e.tail, p_col), (e.head, q_col)] {
        let cols: Vec<usize> = matrix.row(row).keys().copied().collect();
        for c in cols {
            matrix.set(row, c, Rational::zero());
        }
        matrix.set(row, col, Rational::one());
    }
    debug_assert!(validate_matrix(agg, &matrix).is_ok());
    Ok(NodalProlongation { matrix })
}

/// Convenience for building aggregates from 1-based literal sets.
pub fn sets_from_one_based(sets: &[&[usize]]) -> Vec<BTreeSet<usize>> {
    sets.iter()
        .map(|s| s.iter().map(|p| p - 1).collect())
        .collect()
}
