//! File-driven pipeline behind the command line: load an instance, build
//! the coarse topology, solve for β, and write the outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::aggregation::{
    build_reciprocal, counterexample_alpha, default_alpha, load_alpha, Aggregation,
    AggregationError, NodalProlongation,
};
use crate::generate::{GenerationError, Instance};
use crate::graph::Digraph;
use crate::io::{self, ParseError};
use crate::oracle::{oracle_solve, OracleError, Verdict};
use crate::rational::{format_rational, Rational};
use crate::solver::{
    infeasibility_witness, solve_beta, CorrectionPolicy, MinNorm, RowStatus, SolveError,
    ZeroCorrection,
};
use crate::sparse::SparseMatrix;
use crate::topology::{CoarseTopology, TopologyError};

pub const FINE_GRAPH_FILE: &str = "fine.graph";
pub const AGGREGATES_FILE: &str = "aggregates.txt";
pub const COARSE_GRAPH_FILE: &str = "coarse.graph";
pub const BETA_FILE: &str = "beta.mtx";
pub const ALPHA_FILE: &str = "alpha.mtx";
pub const REPORT_FILE: &str = "report.json";

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {source}", .path.display())]
    Aggregation {
        path: PathBuf,
        source: AggregationError,
    },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFiles {
    pub fine: PathBuf,
    pub aggregates: PathBuf,
    pub alpha: Option<PathBuf>,
    pub coarse: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Correction {
    #[default]
    Minnorm,
    Zero,
}

impl Correction {
    fn policy(self) -> &'static dyn CorrectionPolicy {
        match self {
            Correction::Minnorm => &MinNorm,
            Correction::Zero => &ZeroCorrection,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Correction::Minnorm => "minnorm",
            Correction::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub correction: Correction,
    /// Adds wall-clock time to the report, which then stops being
    /// reproducible byte for byte.
    pub timing: bool,
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub fine: Digraph,
    pub aggregation: Aggregation,
    pub alpha: NodalProlongation,
    pub alpha_from_file: bool,
    pub coarse: Option<Digraph>,
}

impl LoadedInstance {
    pub fn with_default_alpha(fine: Digraph, aggregation: Aggregation) -> Self {
        let alpha = default_alpha(&aggregation);
        LoadedInstance {
            fine,
            aggregation,
            alpha,
            alpha_from_file: false,
            coarse: None,
        }
    }

    pub fn topology(&self) -> Result<CoarseTopology, TopologyError> {
        match &self.coarse {
            Some(coarse) => {
                CoarseTopology::with_coarse_graph(&self.aggregation, &self.fine, coarse.clone())
            }
            None => CoarseTopology::build(&self.aggregation, &self.fine),
        }
    }
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, PipelineError> {
    r.map_err(|source| PipelineError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instance(files: &InstanceFiles) -> Result<LoadedInstance, PipelineError> {
    let fine = parsed(&files.fine, io::parse_graph(&read(&files.fine)?))?;
    let (sets, fine_nodes) = parsed(
        &files.aggregates,
        io::parse_aggregates(&read(&files.aggregates)?),
    )?;
    let agg_err = |source| PipelineError::Aggregation {
        path: files.aggregates.clone(),
        source,
    };
    if fine_nodes != fine.node_count() {
        return Err(PipelineError::Topology(
            TopologyError::FineNodeCountMismatch {
                aggregation: fine_nodes,
                graph: fine.node_count(),
            },
        ));
    }
    let aggregation = build_reciprocal(sets, fine_nodes).map_err(agg_err)?;

    let mut instance = LoadedInstance::with_default_alpha(fine, aggregation);
    if let Some(path) = &files.alpha {
        let t = parsed(path, io::parse_matrix(&read(path)?))?;
        let expected = (
            instance.aggregation.fine_node_count(),
            instance.aggregation.coarse_node_count(),
        );
        if (t.rows, t.cols) != expected {
            return Err(PipelineError::Parse {
                path: path.clone(),
                source: ParseError {
                    line: 1,
                    message: format!(
                        "α must be {}x{}, header says {}x{}",
                        expected.0, expected.1, t.rows, t.cols
                    ),
                },
            });
        }
        instance.alpha = load_alpha(&instance.aggregation, t.entries).map_err(|source| {
            PipelineError::Aggregation {
                path: path.clone(),
                source,
            }
        })?;
        instance.alpha_from_file = true;
    }
    if let Some(path) = &files.coarse {
        instance.coarse = Some(parsed(path, io::parse_graph(&read(path)?))?);
    }
    Ok(instance)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSummary {
    pub fine_nodes: usize,
    pub fine_edges: usize,
    pub coarse_nodes: usize,
    pub coarse_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub solved: usize,
    pub skipped_not_in_f_tilde: usize,
    pub infeasible: usize,
}

/// A fine edge whose induced coarse subgraph is disconnected. Indices are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisconnectedRow {
    pub fine_edge: usize,
    pub components: Vec<Vec<usize>>,
    /// Sum of `Θ_{i,n}` over each component; a nonzero entry proves this
    /// α has no solution for the row.
    pub component_sums: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowEntry {
    pub fine_edge: usize,
    pub status: RowStatus,
    pub connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    pub alpha: &'static str,
    pub coarse_graph: &'static str,
    pub correction: &'static str,
    pub commutativity: bool,
    pub counts: StatusCounts,
    pub cycle_rank_histogram: BTreeMap<usize, usize>,
    pub disconnected: Vec<DisconnectedRow>,
    pub rows: Vec<RowEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub coarse: Digraph,
    /// `None` when some row is infeasible.
    pub beta: Option<SparseMatrix>,
}

impl RunOutput {
    pub fn exit_code(&self) -> i32 {
        if self.report.counts.infeasible > 0 {
            EXIT_INFEASIBLE
        } else {
            EXIT_SUCCESS
        }
    }

    /// Writes the coarse graph, β (when available) and the report.
    pub fn write_to(&self, dir: &Path) -> Result<(), PipelineError> {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write(&dir.join(COARSE_GRAPH_FILE), &io::write_graph(&self.coarse))?;
        if let Some(beta) = &self.beta {
            write(&dir.join(BETA_FILE), &io::write_matrix(beta))?;
        }
        write(&dir.join(REPORT_FILE), &self.report.to_json())
    }
}

pub fn run_instance(
    instance: &LoadedInstance,
    options: RunOptions,
) -> Result<RunOutput, PipelineError> {
    let start = Instant::now();
    let topology = instance.topology()?;
    let outcome = solve_beta(
        &instance.fine,
        &instance.aggregation,
        &instance.alpha,
        &topology,
        options.correction.policy(),
    )?;
    let coarse = topology.coarse_graph().clone();
    let solve = &outcome.report;

    let disconnected = solve
        .rows
        .iter()
        .filter(|r| r.status == RowStatus::Infeasible)
        .map(|r| DisconnectedRow {
            fine_edge: r.fine_edge + 1,
            components: r
                .components
                .iter()
                .map(|c| c.iter().map(|n| n + 1).collect())
                .collect(),
            component_sums: r.component_sums.iter().map(format_rational).collect(),
        })
        .collect();
    let rows = solve
        .rows
        .iter()
        .map(|r| RowEntry {
            fine_edge: r.fine_edge + 1,
            status: r.status,
            connected: r.status != RowStatus::Infeasible,
            root: r.root.map(|n| n + 1),
            cycle_rank: r.cycle_rank,
        })
        .collect();
    let report = RunReport {
        instance: InstanceSummary {
            fine_nodes: instance.fine.node_count(),
            fine_edges: instance.fine.edge_count(),
            coarse_nodes: coarse.node_count(),
            coarse_edges: coarse.edge_count(),
        },
        alpha: if instance.alpha_from_file {
            "file"
        } else {
            "default"
        },
        coarse_graph: if instance.coarse.is_some() {
            "file"
        } else {
            "built"
        },
        correction: options.correction.name(),
        commutativity: solve.commutativity_verified,
        counts: StatusCounts {
            solved: solve.count(RowStatus::Solved),
            skipped_not_in_f_tilde: solve.count(RowStatus::SkippedNotInFTilde),
            infeasible: solve.count(RowStatus::Infeasible),
        },
        cycle_rank_histogram: solve.cycle_rank_histogram(),
        disconnected,
        rows,
        timing_ms: options.timing.then(|| start.elapsed().as_millis()),
    };
    Ok(RunOutput {
        report,
        coarse,
        beta: outcome.beta.map(|b| b.matrix().clone()),
    })
}

pub fn run_pipeline(
    files: &InstanceFiles,
    options: RunOptions,
) -> Result<RunOutput, PipelineError> {
    run_instance(&load_instance(files)?, options)
}

pub fn write_instance(instance: &Instance, dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write(&dir.join(FINE_GRAPH_FILE), &io::write_graph(&instance.fine))?;
    write(
        &dir.join(AGGREGATES_FILE),
        &io::write_aggregates(&instance.aggregation),
    )
}

/// Oracle verdicts next to the solver's α-specific solvability.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub verdicts: Vec<Verdict>,
    pub solver_solvable: Vec<bool>,
}

impl OracleComparison {
    pub fn agrees(&self) -> bool {
        self.verdicts
            .iter()
            .zip(&self.solver_solvable)
            .all(|(v, &s)| v.is_solvable() == s)
    }

    pub fn all_solvable(&self) -> bool {
        self.verdicts.iter().all(Verdict::is_solvable)
    }
}

pub fn run_oracle(instance: &LoadedInstance) -> Result<OracleComparison, PipelineError> {
    let topology = instance.topology()?;
    let verdicts = oracle_solve(
        &instance.fine,
        &instance.aggregation,
        &instance.alpha,
        topology.coarse_graph(),
    )?;
    let outcome = solve_beta(
        &instance.fine,
        &instance.aggregation,
        &instance.alpha,
        &topology,
        &ZeroCorrection,
    )?;
    let solver_solvable = outcome
        .report
        .rows
        .iter()
        .map(|r| r.solvable_for_alpha())
        .collect();
    Ok(OracleComparison {
        verdicts,
        solver_solvable,
    })
}

/// A counterexample α for one disconnected induced subgraph.
#[derive(Debug, Clone)]
pub struct Witness {
    pub fine_edge: usize,
    pub component: Vec<usize>,
    pub alpha: NodalProlongation,
    pub value: Rational,
}

/// Builds a counterexample α for `fine_edge`, or for the first fine edge
/// whose induced subgraph is disconnected. The first component is used.
pub fn find_witness(
    instance: &LoadedInstance,
    fine_edge: Option<usize>,
) -> Result<Witness, PipelineError> {
    let topology = instance.topology()?;
    let candidates: Vec<usize> = match fine_edge {
        Some(i) if i < instance.fine.edge_count() => vec![i],
        Some(i) => {
            return Err(PipelineError::Usage(format!(
                "fine edge {} does not exist",
                i + 1
            )))
        }
        None => (0..instance.fine.edge_count()).collect(),
    };
    let sub = candidates
        .into_iter()
        .map(|i| topology.induced_subgraph(i))
        .find(|s| !s.connected)
        .ok_or_else(|| PipelineError::Usage("no disconnected induced subgraph".into()))?;
    let component = &sub.components[0];
    let alpha = counterexample_alpha(
        &instance.aggregation,
        &instance.fine,
        sub.fine_edge,
        component,
    )
    .map_err(|source| PipelineError::Usage(source.to_string()))?;
    let value = infeasibility_witness(&instance.fine, sub.fine_edge, component, &alpha);
    Ok(Witness {
        fine_edge: sub.fine_edge,
        component: component.iter().copied().collect(),
        alpha,
        value,
    })
}

pub fn write_alpha(alpha: &NodalProlongation, path: &Path) -> Result<(), PipelineError> {
    write(path, &io::write_matrix(alpha.matrix()))
}
