#![allow(dead_code)]

use ghcut_core::gen;
use ghcut_core::graph::{Graph, TerminalSet};
use proptest::prelude::*;

/// Arbitrary multigraph on `2..=max_n` vertices, possibly disconnected.
pub fn any_graph(max_n: usize, max_w: u64) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n, 1..=max_w), 0..3 * n)
            .prop_map(move |e| Graph::new(n, e.into_iter().filter(|(a, b, _)| a != b)).unwrap())
    })
}

/// Seeded connected graph with `n - 1..=3n` edges.
pub fn connected(min_n: usize, max_n: usize, max_w: u64) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, any::<u64>(), 0usize..1000)
        .prop_map(move |(n, seed, extra)| gen::random_connected(n, n - 1 + extra % (2 * n + 1), max_w, seed))
}

pub fn terminals(n: usize, seed: u64) -> TerminalSet {
    gen::random_terminals(n, seed)
}

pub fn k4() -> Graph {
    Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap()
}

pub fn bridged() -> Graph {
    Graph::new(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)]).unwrap()
}
