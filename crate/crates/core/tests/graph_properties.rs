use std::collections::BTreeSet;

use proptest::prelude::*;

use gradprol::graph::{
    build_incidence, connected_components, fundamental_cycles, spanning_tree, Digraph,
};
use gradprol::oracle::cycle_space_dimension;

fn digraph() -> impl Strategy<Value = Digraph> {
    (1usize..9).prop_flat_map(|n| {
        let edge = (0..n, 0..n).prop_filter("no self-loops", |(a, b)| a != b);
        let edges = if n == 1 {
            Just(Vec::new()).boxed()
        } else {
            prop::collection::vec(edge, 0..16).boxed()
        };
        edges.prop_map(move |edges| Digraph::new(n, edges).unwrap())
    })
}

/// A graph with a node restriction and the edges it induces.
fn restriction() -> impl Strategy<Value = (Digraph, BTreeSet<usize>, BTreeSet<usize>)> {
    digraph().prop_flat_map(|g| {
        let n = g.node_count();
        prop::collection::btree_set(0..n, 0..=n).prop_map(move |nodes| {
            let edges = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| nodes.contains(&e.tail) && nodes.contains(&e.head))
                .map(|(i, _)| i)
                .collect();
            (g.clone(), nodes, edges)
        })
    })
}

proptest! {
    #[test]
    fn incidence_rows_have_two_opposite_entries(g in digraph()) {
        let gm = build_incidence(&g);
        for i in 0..g.edge_count() {
            let entries: Vec<i8> = (0..g.node_count()).map(|n| gm.entry(i, n)).filter(|&v| v != 0).collect();
            prop_assert_eq!(entries.len(), 2);
            prop_assert_eq!(entries.iter().map(|&v| v as i32).sum::<i32>(), 0);
            prop_assert_eq!(gm.entry(i, g.edge(i).tail), -1);
            prop_assert_eq!(gm.entry(i, g.edge(i).head), 1);
        }
    }

    #[test]
    fn forests_and_cycles((g, nodes, edges) in restriction()) {
        let components = connected_components(&g, &nodes, &edges).unwrap();
        let covered: BTreeSet<usize> = components.iter().flatten().copied().collect();
        prop_assert_eq!(&covered, &nodes);
        let firsts: Vec<usize> = components.iter().map(|c| *c.first().unwrap()).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));

        let mut cycle_count = 0;
        for comp in &components {
            let comp_edges: BTreeSet<usize> = edges
                .iter()
                .copied()
                .filter(|&e| comp.contains(&g.edge(e).tail))
                .collect();
            let root = *comp.first().unwrap();
            let tree = spanning_tree(&g, comp, &comp_edges, root).unwrap();
            prop_assert_eq!(tree.tree_edges.len(), comp.len() - 1);
            for &v in comp {
                // parents lead back to the root
                let mut node = v;
                let mut steps = 0;
                while node != root {
                    node = tree.parent[&node].0;
                    steps += 1;
                    prop_assert!(steps <= comp.len());
                }
            }
            let cycles = fundamental_cycles(&g, comp, &comp_edges, &tree).unwrap();
            prop_assert_eq!(cycles.len(), comp_edges.len() + 1 - comp.len());
            for c in &cycles {
                prop_assert!(c.annihilates_incidence(&g));
            }
            cycle_count += cycles.len();
        }
        prop_assert_eq!(cycle_count + nodes.len(), edges.len() + components.len());
        prop_assert_eq!(cycle_count, cycle_space_dimension(&g, &nodes, &edges));
    }

    #[test]
    fn flipping_an_edge_flips_its_row_and_cycle_signs(g in digraph(), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.edge_count() > 0);
        let flip = pick.index(g.edge_count());
        let flipped = g.with_flipped(&BTreeSet::from([flip]));

        let mut a = build_incidence(&g).to_sparse();
        a.negate_row(flip);
        prop_assert_eq!(a, build_incidence(&flipped).to_sparse());

        let (nodes, edges) = (g.all_nodes(), g.all_edges());
        for comp in connected_components(&g, &nodes, &edges).unwrap() {
            let comp_edges: BTreeSet<usize> =
                edges.iter().copied().filter(|&e| comp.contains(&g.edge(e).tail)).collect();
            let root = *comp.first().unwrap();
            // BFS ignores orientation, so the trees coincide
            let t1 = spanning_tree(&g, &comp, &comp_edges, root).unwrap();
            let t2 = spanning_tree(&flipped, &comp, &comp_edges, root).unwrap();
            prop_assert_eq!(&t1, &t2);
            let c1 = fundamental_cycles(&g, &comp, &comp_edges, &t1).unwrap();
            let c2 = fundamental_cycles(&flipped, &comp, &comp_edges, &t2).unwrap();
            for (x, y) in c1.iter().zip(&c2) {
                // each cycle holds exactly one non-tree edge
                let own_edge = !t1.tree_edges.contains(&flip) && x.coefficients.contains_key(&flip);
                for (e, &s) in &x.coefficients {
                    let expected = if own_edge {
                        // the non-tree edge keeps +1, so the cycle renormalizes with
                        // the opposite overall sign
                        if *e == flip { s } else { -s }
                    } else if *e == flip {
                        -s
                    } else {
                        s
                    };
                    prop_assert_eq!(y.coefficients[e], expected);
                }
                prop_assert!(y.annihilates_incidence(&flipped));
            }
        }
    }
}
