//! Seeded random test instances.
//!
//! The fine graph is a random Hamiltonian path plus random chords, so it is
//! always connected. Aggregates grow from random seed nodes by randomized
//! breadth-first claiming; overlap is then added across aggregate
//! boundaries. Output is a pure function of the parameters (ChaCha8 stream).

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::aggregation::{build_reciprocal, load_alpha, Aggregation, NodalProlongation};
use crate::graph::{connected_components, Digraph};
use crate::rational::Rational;

/// Attempts per requested chord before giving up.
const CHORD_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("generation failed: {0}")]
    GenerationFailure(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub fine_nodes: usize,
    /// Target edges per node; the graph always has at least `fine_nodes - 1`
    /// edges (the backbone path).
    pub density: f64,
    pub aggregates: usize,
    /// Probability that an edge crossing two aggregates pulls one endpoint
    /// into the other aggregate as well.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub fine: Digraph,
    pub aggregation: Aggregation,
}

pub fn generate_instance(params: &GeneratorParams) -> Result<Instance, GenerationError> {
    let GeneratorParams {
        seed,
        fine_nodes: n,
        density,
        aggregates,
        overlap,
    } = *params;
    if n < 2 {
        return Err(GenerationError::InvalidParameters(
            "need at least 2 fine nodes".into(),
        ));
    }
    if aggregates == 0 || aggregates > n {
        return Err(GenerationError::InvalidParameters(format!(
            "aggregate count {aggregates} must be in 1..={n}"
        )));
    }
    if !(density.is_finite() && density > 0.0) {
        return Err(GenerationError::InvalidParameters(
            "density must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&overlap) {
        return Err(GenerationError::InvalidParameters(
            "overlap must be in [0, 1]".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = random_graph(&mut rng, n, density)?;
    let sets = grow_aggregates(&mut rng, &fine, aggregates, overlap);
    let aggregation =
        build_reciprocal(sets, n).map_err(|e| GenerationError::GenerationFailure(e.to_string()))?;
    Ok(Instance { fine, aggregation })
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Result<Digraph, GenerationError> {
    let max_edges = n * (n - 1) / 2;
    let target = ((density * n as f64).round() as usize).clamp(n - 1, max_edges);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(target);
    for w in order.windows(2) {
        pairs.insert((w[0].min(w[1]), w[0].max(w[1])));
        edges.push((w[0], w[1]));
    }
    let mut attempts = 0;
    while edges.len() < target {
        attempts += 1;
        if attempts > CHORD_ATTEMPTS * target {
            return Err(GenerationError::GenerationFailure(format!(
                "could not place {target} edges on {n} nodes"
            )));
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && pairs.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        }
    }
    edges.shuffle(rng);
    for e in edges.iter_mut() {
        if rng.gen_bool(0.5) {
            *e = (e.1, e.0);
        }
    }
    let g = Digraph::new(n, edges).expect("distinct endpoints in range");
    let components =
        connected_components(&g, &g.all_nodes(), &g.all_edges()).expect("full restriction");
    if components.len() != 1 {
        return Err(GenerationError::GenerationFailure(
            "fine graph is disconnected".into(),
        ));
    }
    Ok(g)
}

fn grow_aggregates(
    rng: &mut ChaCha8Rng,
    fine: &Digraph,
    count: usize,
    overlap: f64,
) -> Vec<BTreeSet<usize>> {
    let n = fine.node_count();
    let mut neighbors = vec![Vec::new(); n];
    for e in fine.edges() {
        neighbors[e.tail].push(e.head);
        neighbors[e.head].push(e.tail);
    }

    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for (agg, &seed) in nodes[..count].iter().enumerate() {
        owner[seed] = Some(agg);
        candidates.extend(neighbors[seed].iter().map(|&w| (w, agg)));
    }
    while !candidates.is_empty() {
        let k = rng.gen_range(0..candidates.len());
        let (v, agg) = candidates.swap_remove(k);
        if owner[v].is_none() {
            owner[v] = Some(agg);
            candidates.extend(
                neighbors[v]
                    .iter()
                    .filter(|&&w| owner[w].is_none())
                    .map(|&w| (w, agg)),
            );
        }
    }

    let mut sets = vec![BTreeSet::new(); count];
    for (v, o) in owner.iter().enumerate() {
        sets[o.expect("connected graph is fully claimed")].insert(v);
    }
    if overlap > 0.0 {
        for e in fine.edges() {
            let (a, b) = (owner[e.tail].unwrap(), owner[e.head].unwrap());
            if a != b && rng.gen_bool(overlap) {
                if rng.gen_bool(0.5) {
                    sets[a].insert(e.head);
                } else {
                    sets[b].insert(e.tail);
                }
            }
        }
    }
    sets
}

/// A random α respecting the partition of unity and the aggregate supports.
/// Weights are small integers, some zero, normalized per row.
pub fn random_alpha(agg: &Aggregation, seed: u64) -> NodalProlongation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for p in 0..agg.fine_node_count() {
        let coarse: Vec<usize> = agg.reciprocal(p).iter().copied().collect();
        let mut weights: Vec<i64> = coarse.iter().map(|_| rng.gen_range(0..5)).collect();
        if weights.iter().all(|&w| w == 0) {
            let k = rng.gen_range(0..weights.len());
            weights[k] = 1;
        }
        let total: i64 = weights.iter().sum();
        for (&n, &w) in coarse.iter().zip(&weights) {
            if w != 0 {
                entries.push((p, n, Rational::new(w.into(), total.into())));
            }
        }
    }
    load_alpha(agg, entries).expect("normalized weights on the aggregate support")
}
