//! Seeded graph generators and the catalog of small connected graphs.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, TerminalSet, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random connected simple graph: a random spanning tree plus uniformly
/// chosen extra pairs. `m` is clamped to `[n - 1, n(n - 1)/2]`; weights are
/// uniform in `1..=max_w`.
pub fn random_connected(n: usize, m: usize, max_w: u64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let max_m = n * n.saturating_sub(1) / 2;
    let m = m.clamp(n.saturating_sub(1), max_m);
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut r);
    let mut pairs: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        pairs.insert((a.min(b), a.max(b)));
    }
    if m * 3 > max_m * 2 {
        // dense: sample the complement's survivors
        let mut rest: Vec<(Vertex, Vertex)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|p| !pairs.contains(p)).collect();
        rest.shuffle(&mut r);
        pairs.extend(rest.into_iter().take(m - pairs.len()));
    } else {
        while pairs.len() < m {
            let a = r.gen_range(0..n);
            let b = r.gen_range(0..n);
            if a != b {
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    let edges: Vec<(Vertex, Vertex, u64)> = pairs.into_iter().map(|(a, b)| (a, b, r.gen_range(1..=max_w.max(1)))).collect();
    Graph::new(n, edges).expect("generated graph is valid")
}

/// `k` cliques of `size` vertices in a chain, consecutive cliques joined by
/// one edge between random members.
pub fn bridged_cliques(k: usize, size: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for c in 0..k {
        let base = c * size;
        for a in 0..size {
            for b in a + 1..size {
                edges.push((base + a, base + b, 1));
            }
        }
        if c > 0 {
            let a = (c - 1) * size + r.gen_range(0..size);
            let b = base + r.gen_range(0..size);
            edges.push((a, b, 1));
        }
    }
    Graph::new(k * size, edges).expect("generated graph is valid")
}

/// Union of `d / 2` random Hamiltonian cycles (at least one), parallel
/// edges merged.
pub fn random_expander(n: usize, d: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    if n >= 2 {
        for _ in 0..(d / 2).max(1) {
            let mut order: Vec<Vertex> = (0..n).collect();
            order.shuffle(&mut r);
            for i in 0..n {
                let (a, b) = (order[i], order[(i + 1) % n]);
                if a != b {
                    edges.push((a, b, 1));
                }
            }
        }
    }
    Graph::new(n, edges).expect("generated graph is valid").simplified()
}

/// Uniform random recursive tree with weights in `1..=max_w`.
pub fn random_tree(n: usize, max_w: u64, seed: u64) -> Graph {
    random_connected(n, 0, max_w, seed)
}

/// A uniformly random terminal subset of size `2..=n` (all of `V` when
/// `n < 2`).
pub fn random_terminals(n: usize, seed: u64) -> TerminalSet {
    let mut r = rng(seed);
    if n < 2 {
        return TerminalSet::all(n);
    }
    let k = r.gen_range(2..=n);
    let mut all: Vec<Vertex> = (0..n).collect();
    all.shuffle(&mut r);
    all.truncate(k);
    TerminalSet::new(all)
}

fn bit(n: usize, a: usize, b: usize) -> u64 {
    let (a, b) = (a.min(b), a.max(b));
    // row-major index of pair (a, b) in the upper triangle
    1u64 << (a * (2 * n - a - 1) / 2 + (b - a - 1))
}

/// Canonical adjacency code: vertices sorted by degree, then the minimum
/// code over permutations within each degree class.
fn canonical(n: usize, adj: &[u32]) -> u64 {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (adj[v].count_ones(), v));
    let deg: Vec<u32> = order.iter().map(|&v| adj[v].count_ones()).collect();
    let mut best = u64::MAX;
    let mut perm = order.clone();
    permute_classes(n, adj, &deg, &mut perm, 0, &mut best);
    best
}

fn permute_classes(n: usize, adj: &[u32], deg: &[u32], perm: &mut Vec<usize>, start: usize, best: &mut u64) {
    if start == n {
        let mut code = 0;
        for i in 0..n {
            for j in i + 1..n {
                if adj[perm[i]] >> perm[j] & 1 == 1 {
                    code |= bit(n, i, j);
                }
            }
        }
        *best = (*best).min(code);
        return;
    }
    let mut end = start;
    while end < n && deg[end] == deg[start] {
        end += 1;
    }
    let mut block: Vec<usize> = perm[start..end].to_vec();
    block.sort_unstable();
    loop {
        perm[start..end].copy_from_slice(&block);
        permute_classes(n, adj, deg, perm, end, best);
        if !next_permutation(&mut block) {
            break;
        }
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn decode(n: usize, code: u64) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if code & bit(n, a, b) != 0 {
                edges.push((a, b, 1));
            }
        }
    }
    Graph::new(n, edges).expect("catalog graph is valid")
}

/// All connected simple unweighted graphs on `n <= 8` vertices, one per
/// isomorphism class, in increasing canonical code order.
pub fn catalog(n: usize) -> Vec<Graph> {
    assert!((1..=8).contains(&n), "catalog supports 1..=8 vertices");
    // every class on k vertices extends a class on k - 1 vertices
    let mut level: BTreeSet<u64> = BTreeSet::from([0]);
    for k in 2..=n {
        let mut next = BTreeSet::new();
        for &code in &level {
            let mut adj = vec![0u32; k];
            for a in 0..k - 1 {
                for b in a + 1..k - 1 {
                    if code & bit(k - 1, a, b) != 0 {
                        adj[a] |= 1 << b;
                        adj[b] |= 1 << a;
                    }
                }
            }
            for nb in 0u32..(1 << (k - 1)) {
                let mut ext = adj.clone();
                ext[k - 1] = nb;
                for a in 0..k - 1 {
                    if nb >> a & 1 == 1 {
                        ext[a] |= 1 << (k - 1);
                    }
                }
                next.insert(canonical(k, &ext));
            }
        }
        level = next;
    }
    level.into_iter().map(|c| decode(n, c)).filter(|g| g.is_connected()).collect()
}
