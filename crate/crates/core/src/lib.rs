//! Coarse edge prolongations that commute with the discrete gradient.
//!
//! Given a fine digraph with incidence matrix `Gʰ`, an overlapping
//! aggregation of its nodes and a nodal prolongation α, this crate builds a
//! coarse digraph with incidence matrix `G^H` and an edge prolongation β
//! such that `Gʰ α = β G^H` holds exactly. All arithmetic is over exact
//! rationals.
//!
//! Such a β exists for every admissible α if and only if, for every fine
//! edge `i`, the coarse subgraph induced by the coarse nodes that `i`
//! touches is connected. The default coarse graph satisfies this by
//! construction; supplied coarse graphs are checked, and
//! [`aggregation::counterexample_alpha`] produces an α that cannot be
//! matched when the check fails.
//!
//! ```
//! use gradprol::aggregation::{build_reciprocal, default_alpha};
//! use gradprol::graph::Digraph;
//! use gradprol::solver::{solve_beta, MinNorm};
//! use gradprol::topology::CoarseTopology;
//!
//! // path 1 -> 2 -> 3 -> 4, aggregates {1,2,3} and {2,3,4}
//! let fine = Digraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
//! let agg = build_reciprocal(vec![[0, 1, 2].into(), [1, 2, 3].into()], 4).unwrap();
//! let alpha = default_alpha(&agg);
//! let topo = CoarseTopology::build(&agg, &fine).unwrap();
//! let out = solve_beta(&fine, &agg, &alpha, &topo, &MinNorm).unwrap();
//! assert!(out.report.commutativity_verified);
//! assert_eq!(out.beta.unwrap().matrix().nnz(), 2);
//! ```

pub mod aggregation;
pub mod dense;
pub mod generate;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod solver;
pub mod sparse;
pub mod topology;
