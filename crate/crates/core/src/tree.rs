//! Steiner Gomory-Hu trees and their verification.

use std::collections::{BTreeMap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{internal, invalid, Result};
use crate::graph::{Graph, TerminalSet, Vertex};
use crate::ratio::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub w: u64,
}

/// A weighted tree over terminal labels plus the assignment `f: V -> U`.
///
/// Labels are vertex ids of the graph the tree describes. While a recursion
/// is being combined a label may also name a placeholder that is not a
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerGHTree {
    nodes: Vec<usize>,
    edges: Vec<TreeEdge>,
    assignment: Vec<usize>,
    index: BTreeMap<usize, usize>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl SteinerGHTree {
    /// Validates that `edges` form a spanning tree on `nodes` and that `f`
    /// only targets nodes.
    pub fn new(mut nodes: Vec<usize>, edges: Vec<TreeEdge>, assignment: Vec<usize>) -> Result<SteinerGHTree> {
        nodes.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return internal("duplicate tree node");
        }
        if nodes.is_empty() {
            return invalid("tree without nodes");
        }
        let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        if edges.len() + 1 != nodes.len() {
            return internal(format!("{} edges on {} tree nodes", edges.len(), nodes.len()));
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            let (Some(&a), Some(&b)) = (index.get(&e.a), index.get(&e.b)) else {
                return internal(format!("tree edge ({}, {}) leaves the node set", e.a, e.b));
            };
            if a == b {
                return internal("tree self-loop");
            }
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        let mut seen = vec![false; nodes.len()];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        if count != nodes.len() {
            return internal("tree is disconnected");
        }
        for &f in &assignment {
            if !index.contains_key(&f) {
                return internal(format!("assignment targets non-node {f}"));
            }
        }
        Ok(SteinerGHTree { nodes, edges, assignment, index, adj })
    }

    /// The one-node tree mapping all `n` vertices to `node`.
    pub fn singleton(node: usize, n: usize) -> SteinerGHTree {
        SteinerGHTree::new(vec![node], Vec::new(), vec![node; n]).expect("valid singleton")
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn f(&self, v: Vertex) -> usize {
        self.assignment[v]
    }

    pub fn contains(&self, node: usize) -> bool {
        self.index.contains_key(&node)
    }

    /// Tree edges on the `s`-`t` path, in order from `s`.
    pub fn path(&self, s: usize, t: usize) -> Result<Vec<usize>> {
        let (Some(&si), Some(&ti)) = (self.index.get(&s), self.index.get(&t)) else {
            return invalid("path endpoint is not a tree node");
        };
        let mut parent = vec![(usize::MAX, usize::MAX); self.nodes.len()];
        parent[si] = (si, usize::MAX);
        let mut queue = VecDeque::from([si]);
        while let Some(x) = queue.pop_front() {
            if x == ti {
                break;
            }
            for &(y, k) in &self.adj[x] {
                if parent[y].0 == usize::MAX {
                    parent[y] = (x, k);
                    queue.push_back(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut x = ti;
        while x != si {
            let (p, k) = parent[x];
            out.push(k);
            x = p;
        }
        out.reverse();
        Ok(out)
    }

    /// Minimum edge weight on the `s`-`t` path.
    pub fn path_min(&self, s: usize, t: usize) -> Result<u64> {
        let p = self.path(s, t)?;
        p.iter().map(|&k| self.edges[k].w).min().ok_or_else(|| crate::error::Error::InvalidArgument("s = t".into()))
    }

    /// Nodes on the side of `from` after deleting edge `k`.
    pub fn side(&self, k: usize, from: usize) -> Vec<usize> {
        let si = self.index[&from];
        let mut seen = vec![false; self.nodes.len()];
        seen[si] = true;
        let mut stack = vec![si];
        while let Some(x) = stack.pop() {
            for &(y, e) in &self.adj[x] {
                if e != k && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).map(|i| self.nodes[i]).collect()
    }

    /// `f^{-1}(nodes)`.
    pub fn preimage(&self, nodes: &[usize]) -> Vec<Vertex> {
        let set: std::collections::BTreeSet<usize> = nodes.iter().copied().collect();
        (0..self.assignment.len()).filter(|&v| set.contains(&self.assignment[v])).collect()
    }

    /// Neighbors of `node` with the connecting edge weights.
    pub fn neighbors(&self, node: usize) -> Vec<(usize, u64)> {
        self.adj[self.index[&node]].iter().map(|&(y, k)| (self.nodes[y], self.edges[k].w)).collect()
    }

    /// Edges sorted for canonical output.
    pub fn sorted_edges(&self) -> Vec<TreeEdge> {
        let mut e: Vec<TreeEdge> = self
            .edges
            .iter()
            .map(|e| TreeEdge { a: e.a.min(e.b), b: e.a.max(e.b), w: e.w })
            .collect();
        e.sort_unstable();
        e
    }
}

/// One failed pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub s: Vertex,
    pub t: Vertex,
    pub lambda: u64,
    pub tree_value: u64,
    /// Weight of the preimage side, `None` when it does not separate.
    pub preimage_weight: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pairs_checked: usize,
    pub structural: Vec<String>,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }
}

/// `lo <= x <= (1 + eps) lo`.
fn within(x: u64, lo: u64, eps: Ratio) -> bool {
    x >= lo && (x as u128) * eps.denom() <= (lo as u128) * (eps.denom() + eps.numer())
}

/// Checks the Steiner Gomory-Hu property against connectivities given by
/// `lambda`. Every terminal pair is checked unless `sample` caps the count,
/// in which case a seeded sample of that many pairs is drawn.
pub fn verify_gh_tree(
    g: &Graph,
    u: &TerminalSet,
    t: &SteinerGHTree,
    eps: Ratio,
    lambda: &mut dyn FnMut(Vertex, Vertex) -> Result<u64>,
    sample: Option<(usize, u64)>,
) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if t.nodes() != u.members() {
        report.structural.push("tree nodes differ from the terminal set".into());
        return Ok(report);
    }
    if t.assignment().len() != g.n() {
        report.structural.push("assignment does not cover the vertex set".into());
        return Ok(report);
    }
    for &x in u.members() {
        if t.f(x) != x {
            report.structural.push(format!("terminal {x} is not mapped to itself"));
        }
    }
    let members = u.members();
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            pairs.push((members[i], members[j]));
        }
    }
    if let Some((cap, seed)) = sample {
        if pairs.len() > cap {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            pairs.shuffle(&mut rng);
            pairs.truncate(cap);
            pairs.sort_unstable();
        }
    }
    for (s, tt) in pairs {
        report.pairs_checked += 1;
        let lam = lambda(s, tt)?;
        let path = t.path(s, tt)?;
        let value = path.iter().map(|&k| t.edges()[k].w).min().expect("distinct terminals");
        let mut bad_side: Option<Option<u64>> = None;
        if within(value, lam, eps) {
            // every minimum edge must induce an approximate mincut
            for &k in path.iter().filter(|&&k| t.edges()[k].w == value) {
                let side = t.preimage(&t.side(k, s));
                let separates = side.binary_search(&s).is_ok() && side.binary_search(&tt).is_err();
                let w = if separates { Some(g.cut_weight(&side)?) } else { None };
                let ok = match w {
                    Some(w) => within(w, lam, eps),
                    None => false,
                };
                if !ok {
                    bad_side = Some(w);
                    break;
                }
            }
        } else {
            bad_side = Some(None);
        }
        if let Some(pw) = bad_side {
            report.violations.push(Violation { s, t: tt, lambda: lam, tree_value: value, preimage_weight: pw });
        }
    }
    Ok(report)
}
