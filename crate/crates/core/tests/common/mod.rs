#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradprol::generate::{generate_instance, GeneratorParams, Instance};
use gradprol::graph::Digraph;

/// Parameters spanning the acceptance ranges: up to 200 fine nodes, at
/// most 600 fine edges, 2 to 20 aggregates, overlap in [0, 0.5].
pub fn acceptance_params(seed: u64) -> GeneratorParams {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0000 + seed);
    let fine_nodes = rng.gen_range(20..=200);
    GeneratorParams {
        seed,
        fine_nodes,
        density: rng.gen_range(1.0..=3.0),
        aggregates: rng.gen_range(2..=20),
        overlap: rng.gen_range(0.0..=0.5),
    }
}

pub fn acceptance_instance(seed: u64) -> Instance {
    let inst = generate_instance(&acceptance_params(seed)).expect("generator succeeds");
    assert!(inst.fine.node_count() <= 200 && inst.fine.edge_count() <= 600);
    inst
}

/// Small instances for property tests.
pub fn small_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a11 + seed);
    let fine_nodes = rng.gen_range(4..=40);
    generate_instance(&GeneratorParams {
        seed,
        fine_nodes,
        density: rng.gen_range(1.0..=2.5),
        aggregates: rng.gen_range(1..=fine_nodes.min(8)),
        overlap: rng.gen_range(0.0..=0.6),
    })
    .expect("generator succeeds")
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

pub fn set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().copied().collect()
}

/// Removes coarse edges until some induced subgraph is disconnected.
/// Returns `None` when no removal achieves it.
pub fn break_coarse_graph(
    coarse: &Digraph,
    is_disconnected: impl Fn(&Digraph) -> bool,
    rng: &mut ChaCha8Rng,
) -> Option<Digraph> {
    let mut edges: Vec<(usize, usize)> = coarse.edges().iter().map(|e| (e.tail, e.head)).collect();
    while !edges.is_empty() {
        let k = rng.gen_range(0..edges.len());
        edges.remove(k);
        let g = Digraph::new(coarse.node_count(), edges.clone()).unwrap();
        if is_disconnected(&g) {
            return Some(g);
        }
    }
    None
}
