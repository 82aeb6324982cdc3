//! Edge prolongation β with `Gʰ α = β G^H`.
//!
//! Row `i` of β only couples to the induced subgraph `S^{H,i}`. On that
//! subgraph the row equations form a flow problem: node `n` must receive a
//! net flow of `Θ_{i,n}`. A particular solution lives on a breadth-first
//! spanning tree and is found by eliminating leaves towards the root. The
//! remaining freedom is the cycle space of the subgraph, which a
//! [`CorrectionPolicy`] resolves.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::aggregation::{Aggregation, NodalProlongation};
use crate::dense::DenseMatrix;
use crate::graph::{
    fundamental_cycles, spanning_tree, Cycle, Digraph, IncidenceMatrix, SpanningTree,
};
use crate::rational::{sign, Rational};
use crate::sparse::{SparseMatrix, SparseRow};
use crate::topology::{CoarseTopology, InducedSubgraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("fine edge {}: induced coarse subgraph has {} components", .fine_edge + 1, .components.len())]
    Infeasible {
        fine_edge: usize,
        components: Vec<BTreeSet<usize>>,
    },
    #[error("expected {expected} cycle coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("β G^H differs from Gʰ α at ({}, {})", .row + 1, .col + 1)]
    VerificationFailure { row: usize, col: usize },
    #[error("β has a nonzero at ({}, {}) outside I_e", .row + 1, .col + 1)]
    SupportViolation { row: usize, col: usize },
}

/// `Θ = Gʰ α`, fine edges by coarse nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaMatrix(SparseMatrix);

impl ThetaMatrix {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.0
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        self.0.row(i)
    }
}

pub fn compute_theta(
    gh: &IncidenceMatrix,
    alpha: &NodalProlongation,
    agg: &Aggregation,
) -> Result<ThetaMatrix, SolveError> {
    let a = alpha.matrix();
    if gh.ncols() != a.nrows() {
        return Err(SolveError::DimensionMismatch(format!(
            "Gʰ has {} columns but α has {} rows",
            gh.ncols(),
            a.nrows()
        )));
    }
    let theta = gh.to_sparse().mul(a);
    for i in 0..theta.nrows() {
        let [(p, _), (q, _)] = gh.row(i);
        let support = agg.reciprocal(p) | agg.reciprocal(q);
        if let Some(n) = theta.row(i).keys().find(|n| !support.contains(n)) {
            return Err(SolveError::InternalInconsistency(format!(
                "Θ({}, {}) is nonzero outside C̃",
                i + 1,
                n + 1
            )));
        }
        if !theta.row_sum(i).is_zero() {
            return Err(SolveError::InternalInconsistency(format!(
                "row {} of Θ does not sum to zero",
                i + 1
            )));
        }
    }
    Ok(ThetaMatrix(theta))
}

fn net_inflow(coarse: &Digraph, node: usize, row: &SparseRow) -> Rational {
    row.iter().fold(Rational::zero(), |acc, (&e, v)| {
        acc + v * sign(coarse.edge(e).incidence(node))
    })
}

/// A particular solution of one row system, supported on a spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSolution {
    pub tree: SpanningTree,
    /// Values on every tree edge, zeros included.
    pub beta: SparseRow,
}

/// Solves the row-`i` flow system on a spanning tree of `S^{H,i}` rooted
/// at its smallest node, by leaf-to-root elimination. The root equation is
/// left out of the elimination.
pub fn solve_row(
    coarse: &Digraph,
    sub: &InducedSubgraph,
    theta_row: &SparseRow,
) -> Result<RowSolution, SolveError> {
    if !sub.connected {
        return Err(SolveError::Infeasible {
            fine_edge: sub.fine_edge,
            components: sub.components.clone(),
        });
    }
    let root = *sub.nodes.first().expect("C̃_i is never empty");
    let tree = spanning_tree(coarse, &sub.nodes, &sub.edges, root)
        .map_err(|e| SolveError::InternalInconsistency(e.to_string()))?;

    let mut residual: BTreeMap<usize, Rational> = sub
        .nodes
        .iter()
        .map(|&n| (n, theta_row.get(&n).cloned().unwrap_or_else(Rational::zero)))
        .collect();
    let mut beta = SparseRow::new();
    for &v in tree.order.iter().skip(1).rev() {
        let (parent, e) = tree.parent[&v];
        let edge = coarse.edge(e);
        // the tree edge is the only unknown left at v; its coefficient is ±1
        let value = residual[&v].clone() * sign(edge.incidence(v));
        *residual.get_mut(&parent).unwrap() -= &value * sign(edge.incidence(parent));
        beta.insert(e, value);
    }
    Ok(RowSolution { tree, beta })
}

/// Whether the equation at `root`, skipped by the elimination, holds.
pub fn omitted_equation_check(
    coarse: &Digraph,
    root: usize,
    beta_row: &SparseRow,
    theta_row: &SparseRow,
) -> bool {
    let expected = theta_row.get(&root).cloned().unwrap_or_else(Rational::zero);
    net_inflow(coarse, root, beta_row) == expected
}

/// Whether every node equation of `S^{H,i}` holds.
pub fn row_equations_hold(
    coarse: &Digraph,
    sub: &InducedSubgraph,
    beta_row: &SparseRow,
    theta_row: &SparseRow,
) -> bool {
    sub.nodes
        .iter()
        .all(|&n| omitted_equation_check(coarse, n, beta_row, theta_row))
}

/// Fundamental cycles of `S^{H,i}` for the given spanning tree.
pub fn row_cycles(
    coarse: &Digraph,
    sub: &InducedSubgraph,
    tree: &SpanningTree,
) -> Result<Vec<Cycle>, SolveError> {
    fundamental_cycles(coarse, &sub.nodes, &sub.edges, tree)
        .map_err(|e| SolveError::InternalInconsistency(e.to_string()))
}

/// `β″ = Σ_j c_j z_j` over the fundamental cycles `z_j` of `S^{H,i}`.
pub fn cycle_correction(
    coarse: &Digraph,
    sub: &InducedSubgraph,
    tree: &SpanningTree,
    coefficients: &[Rational],
) -> Result<SparseRow, SolveError> {
    let cycles = row_cycles(coarse, sub, tree)?;
    combine_cycles(&cycles, coefficients)
}

fn combine_cycles(cycles: &[Cycle], coefficients: &[Rational]) -> Result<SparseRow, SolveError> {
    if cycles.len() != coefficients.len() {
        return Err(SolveError::LengthMismatch {
            expected: cycles.len(),
            got: coefficients.len(),
        });
    }
    let mut out = SparseRow::new();
    for (cycle, c) in cycles.iter().zip(coefficients) {
        for (&e, &s) in &cycle.coefficients {
            *out.entry(e).or_insert_with(Rational::zero) += c * sign(s);
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

pub fn add_rows(a: &SparseRow, b: &SparseRow) -> SparseRow {
    let mut out = a.clone();
    for (&e, v) in b {
        *out.entry(e).or_insert_with(Rational::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn dot(a: &SparseRow, b: &SparseRow) -> Rational {
    a.iter()
        .fold(Rational::zero(), |acc, (e, v)| match b.get(e) {
            Some(w) => acc + v * w,
            None => acc,
        })
}

/// Picks the cycle-space component `β″` of one row.
pub trait CorrectionPolicy: Sync {
    /// Coefficients over `cycles`; must have length `cycles.len()`.
    fn coefficients(
        &self,
        fine_edge: usize,
        sub: &InducedSubgraph,
        cycles: &[Cycle],
        beta_prime: &SparseRow,
    ) -> Vec<Rational>;
}

/// Keeps the tree solution as is.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroCorrection;

impl CorrectionPolicy for ZeroCorrection {
    fn coefficients(
        &self,
        _: usize,
        _: &InducedSubgraph,
        cycles: &[Cycle],
        _: &SparseRow,
    ) -> Vec<Rational> {
        vec![Rational::zero(); cycles.len()]
    }
}

/// Minimal Euclidean norm of the corrected row, via the normal equations
/// `(ZᵀZ) c = -Zᵀβ′` of the cycle matrix `Z`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinNorm;

impl CorrectionPolicy for MinNorm {
    fn coefficients(
        &self,
        _: usize,
        _: &InducedSubgraph,
        cycles: &[Cycle],
        beta_prime: &SparseRow,
    ) -> Vec<Rational> {
        let k = cycles.len();
        if k == 0 {
            return Vec::new();
        }
        let z: Vec<SparseRow> = cycles.iter().map(Cycle::to_rational).collect();
        let gram = DenseMatrix::from_fn(k, k, |a, b| dot(&z[a], &z[b]));
        let rhs: Vec<Rational> = z.iter().map(|zj| -dot(zj, beta_prime)).collect();
        gram.solve(&rhs)
            .expect("Gram matrix of independent cycles is positive definite")
    }
}

pub fn default_correction_policy() -> MinNorm {
    MinNorm
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Solved,
    SkippedNotInFTilde,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReport {
    pub fine_edge: usize,
    pub status: RowStatus,
    /// Root of the spanning tree, for solved rows.
    pub root: Option<usize>,
    pub tree_edges: BTreeSet<usize>,
    /// `k_i`, for solved rows.
    pub cycle_rank: Option<usize>,
    pub omitted_equation_ok: bool,
    /// Components of `S^{H,i}` when infeasible.
    pub components: Vec<BTreeSet<usize>>,
    /// Per component, the sum of `Θ_{i,n}`; any nonzero certifies that this
    /// α admits no solution for the row.
    pub component_sums: Vec<Rational>,
}

impl RowReport {
    /// Whether this particular α admits a solution for the row. A
    /// disconnected row is solvable exactly when every component sum
    /// vanishes, since each component is then an ordinary flow problem.
    pub fn solvable_for_alpha(&self) -> bool {
        self.status != RowStatus::Infeasible || self.component_sums.iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub rows: Vec<RowReport>,
    pub commutativity_verified: bool,
}

impl SolveReport {
    pub fn count(&self, status: RowStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn is_feasible(&self) -> bool {
        self.count(RowStatus::Infeasible) == 0
    }

    /// `k_i -> number of solved rows`.
    pub fn cycle_rank_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for k in self.rows.iter().filter_map(|r| r.cycle_rank) {
            *hist.entry(k).or_insert(0) += 1;
        }
        hist
    }
}

/// β with per-row metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeProlongation {
    matrix: SparseMatrix,
}

impl EdgeProlongation {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }
}

/// Assembles β from its rows and checks `β G^H = Gʰ α` entrywise together
/// with the `I_e` support restriction. Rows outside `F̃` must be zero.
pub fn assemble_and_verify(
    gh: &IncidenceMatrix,
    alpha: &NodalProlongation,
    topology: &CoarseTopology,
    rows: Vec<SparseRow>,
) -> Result<EdgeProlongation, SolveError> {
    let coarse = topology.coarse_graph();
    if rows.len() != gh.nrows() {
        return Err(SolveError::DimensionMismatch(format!(
            "{} β rows for {} fine edges",
            rows.len(),
            gh.nrows()
        )));
    }
    let beta = SparseMatrix::from_rows(coarse.edge_count(), rows);
    for (i, e, _) in beta.triplets() {
        if !topology.i(e).contains(&i) {
            return Err(SolveError::SupportViolation { row: i, col: e });
        }
    }
    for i in 0..beta.nrows() {
        if !topology.f_tilde().contains(&i) && !beta.row(i).is_empty() {
            return Err(SolveError::SupportViolation {
                row: i,
                col: *beta.row(i).keys().next().unwrap(),
            });
        }
    }
    let gh_alpha = gh.to_sparse().mul(alpha.matrix());
    let beta_gh = beta.mul(&crate::graph::build_incidence(coarse).to_sparse());
    if let Some((row, col)) = gh_alpha.first_difference(&beta_gh) {
        return Err(SolveError::VerificationFailure { row, col });
    }
    Ok(EdgeProlongation { matrix: beta })
}

/// `Σ_{n ∈ Ĉ} (α_qn - α_pn)` for fine edge `i = (p, q)`.
///
/// Any β respecting the `I_e` support sums to zero over a component of
/// `S^{H,i}`, so a nonzero value proves row `i` unsolvable for this α.
pub fn infeasibility_witness(
    fine: &Digraph,
    i: usize,
    component: &BTreeSet<usize>,
    alpha: &NodalProlongation,
) -> Rational {
    let e = fine.edge(i);
    component.iter().fold(Rational::zero(), |acc, &n| {
        acc + alpha.get(e.head, n) - alpha.get(e.tail, n)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    /// `None` when some row is infeasible.
    pub beta: Option<EdgeProlongation>,
    pub report: SolveReport,
}

/// Runs the whole row-by-row construction and verification.
pub fn solve_beta(
    fine: &Digraph,
    agg: &Aggregation,
    alpha: &NodalProlongation,
    topology: &CoarseTopology,
    policy: &dyn CorrectionPolicy,
) -> Result<SolveOutcome, SolveError> {
    let gh = crate::graph::build_incidence(fine);
    let theta = compute_theta(&gh, alpha, agg)?;
    let coarse = topology.coarse_graph();

    let mut rows = Vec::with_capacity(fine.edge_count());
    let mut reports = Vec::with_capacity(fine.edge_count());
    for i in 0..fine.edge_count() {
        let sub = topology.induced_subgraph(i);
        let theta_row = theta.row(i);
        let mut report = RowReport {
            fine_edge: i,
            status: RowStatus::Solved,
            root: None,
            tree_edges: BTreeSet::new(),
            cycle_rank: None,
            omitted_equation_ok: true,
            components: Vec::new(),
            component_sums: Vec::new(),
        };
        if !sub.connected {
            report.status = RowStatus::Infeasible;
            report.component_sums = sub
                .components
                .iter()
                .map(|c| infeasibility_witness(fine, i, c, alpha))
                .collect();
            report.components = sub.components;
            rows.push(SparseRow::new());
            reports.push(report);
            continue;
        }
        if !topology.f_tilde().contains(&i) {
            // |C̃_i| = 1 and Θ_i vanishes by the row-sum identity
            if !theta_row.is_empty() {
                return Err(SolveError::InternalInconsistency(format!(
                    "row {} is outside F̃ but Θ is nonzero",
                    i + 1
                )));
            }
            report.status = RowStatus::SkippedNotInFTilde;
            rows.push(SparseRow::new());
            reports.push(report);
            continue;
        }

        let RowSolution {
            tree,
            beta: beta_prime,
        } = solve_row(coarse, &sub, theta_row)?;
        report.omitted_equation_ok =
            omitted_equation_check(coarse, tree.root, &beta_prime, theta_row);
        if !report.omitted_equation_ok {
            return Err(SolveError::InternalInconsistency(format!(
                "root equation fails for fine edge {}",
                i + 1
            )));
        }
        let cycles = row_cycles(coarse, &sub, &tree)?;
        let coefficients = policy.coefficients(i, &sub, &cycles, &beta_prime);
        let correction = combine_cycles(&cycles, &coefficients)?;
        report.root = Some(tree.root);
        report.cycle_rank = Some(cycles.len());
        report.tree_edges = tree.tree_edges;
        rows.push(add_rows(&beta_prime, &correction));
        reports.push(report);
    }

    let mut report = SolveReport {
        rows: reports,
        commutativity_verified: false,
    };
    if !report.is_feasible() {
        return Ok(SolveOutcome { beta: None, report });
    }
    let beta = assemble_and_verify(&gh, alpha, topology, rows)?;
    report.commutativity_verified = true;
    Ok(SolveOutcome {
        beta: Some(beta),
        report,
    })
}
