//! Ground truth for tests: subset enumeration, the classical Gomory-Hu
//! construction, and the census of `tau`-connected components.
//!
//! Flows run here go to a private counter; only `oracle_calls` is recorded
//! in the caller's metrics.

use crate::error::{internal, invalid, Error, Result};
use crate::graph::{Graph, TerminalSet, Vertex};
use crate::maxflow;
use crate::metrics::Metrics;
use crate::tree::{SteinerGHTree, TreeEdge};

/// Largest vertex count accepted by the enumeration oracles.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Minimum over all cuts `S` with `sources ⊆ S` and `S ∩ sinks = ∅`.
/// Among minimum cuts the smallest one is returned, ties broken by the
/// lexicographically least sorted vertex list. Vertex-minimal mincuts are
/// unique, so this is the vertex-minimal side.
pub fn brute_force_group_cut(g: &Graph, sources: &[Vertex], sinks: &[Vertex]) -> Result<(u64, Vec<Vertex>)> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Unsupported(format!("brute force limited to {BRUTE_FORCE_LIMIT} vertices")));
    }
    if sources.is_empty() || sinks.is_empty() {
        return invalid("brute force cut needs nonempty sides");
    }
    let mut role = vec![0u8; n];
    for &s in sources {
        role[s] = 1;
    }
    for &t in sinks {
        if role[t] == 1 {
            return invalid("source and sink overlap");
        }
        role[t] = 2;
    }
    let free: Vec<Vertex> = (0..n).filter(|&v| role[v] == 0).collect();
    let mut side: Vec<bool> = (0..n).map(|v| role[v] == 1).collect();
    let mut cut: u64 = g.boundary_weight(&side);
    let mut best = (cut, sources.len(), side.clone());
    let mut size = sources.len();
    for step in 1u64..(1u64 << free.len()) {
        let v = free[step.trailing_zeros() as usize];
        for &(x, w) in g.neighbors(v) {
            if side[x] == side[v] {
                cut += w;
            } else {
                cut -= w;
            }
        }
        side[v] = !side[v];
        if side[v] {
            size += 1;
        } else {
            size -= 1;
        }
        let better = cut < best.0
            || (cut == best.0 && (size < best.1 || (size == best.1 && lex_less(&side, &best.2))));
        if better {
            best = (cut, size, side.clone());
        }
    }
    Ok((best.0, (0..n).filter(|&v| best.2[v]).collect()))
}

/// Compares the sorted member lists of two equal-size masks.
fn lex_less(a: &[bool], b: &[bool]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return *x;
        }
    }
    false
}

/// `(lambda(s, t), minimal s-side)` by enumeration; `n <= 24`.
pub fn brute_force_mincut(metrics: &mut Metrics, g: &Graph, s: Vertex, t: Vertex) -> Result<(u64, Vec<Vertex>)> {
    if s == t {
        return invalid("brute force mincut of a vertex with itself");
    }
    metrics.oracle_calls += 1;
    brute_force_group_cut(g, &[s], &[t])
}

/// Pairwise connectivities of the terminals, one maxflow per pair.
/// Entry `[i][j]` refers to `u.members()[i]` and `u.members()[j]`.
pub fn pairwise_lambda(metrics: &mut Metrics, g: &Graph, u: &TerminalSet) -> Result<Vec<Vec<u64>>> {
    metrics.oracle_calls += 1;
    let mut scratch = Metrics::new();
    let m = u.members();
    let mut out = vec![vec![0u64; m.len()]; m.len()];
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let v = maxflow::max_flow(&mut scratch, g, &[m[i]], &[m[j]])?.value;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// The classical Gomory-Hu construction by repeated contraction: split a
/// supernode holding two terminals along a minimum cut computed with every
/// other subtree of the current tree contracted to a single vertex.
pub fn classic_gomory_hu(metrics: &mut Metrics, g: &Graph, u: &TerminalSet) -> Result<SteinerGHTree> {
    u.validate(g)?;
    if u.is_empty() {
        return invalid("empty terminal set");
    }
    metrics.oracle_calls += 1;
    let mut scratch = Metrics::new();
    let n = g.n();
    // supernode contents, terminals per supernode, tree edges between supernodes
    let mut members: Vec<Vec<Vertex>> = vec![(0..n).collect()];
    let mut terms: Vec<Vec<Vertex>> = vec![u.members().to_vec()];
    let mut tree: Vec<(usize, usize, u64)> = Vec::new();
    while let Some(x) = (0..members.len()).find(|&i| terms[i].len() >= 2) {
        let (s, t) = (terms[x][0], terms[x][1]);
        // subtrees hanging off x, each as (neighbor supernode, vertex set)
        let mut hanging: Vec<(usize, Vec<Vertex>, Vec<usize>)> = Vec::new();
        for &(a, b, _) in &tree {
            let other = if a == x {
                b
            } else if b == x {
                a
            } else {
                continue;
            };
            let comp = subtree(&tree, other, x, members.len());
            let verts: Vec<Vertex> = comp.iter().flat_map(|&c| members[c].iter().copied()).collect();
            hanging.push((other, verts, comp));
        }
        let blocks: Vec<Vec<Vertex>> = hanging.iter().map(|h| h.1.clone()).collect();
        let con = g.contract(&blocks)?;
        let flow = maxflow::max_flow(&mut scratch, &con.graph, &[con.map[s]], &[con.map[t]])?;
        let mut in_s = vec![false; con.graph.n()];
        for &v in &flow.min_source_side {
            in_s[v] = true;
        }
        let (xs, xt): (Vec<Vertex>, Vec<Vertex>) = members[x].iter().partition(|&&v| in_s[con.map[v]]);
        let y = members.len();
        members[x] = xs;
        members.push(xt);
        let (ts, tt): (Vec<Vertex>, Vec<Vertex>) = terms[x].iter().partition(|&&v| in_s[con.map[v]]);
        terms[x] = ts;
        terms.push(tt);
        // neighbors on the sink side move to the new supernode
        for (k, h) in hanging.iter().enumerate() {
            if !in_s[con.block_vertex[k]] {
                for e in tree.iter_mut() {
                    if (e.0 == x && e.1 == h.0) || (e.1 == x && e.0 == h.0) {
                        *e = (y, h.0, e.2);
                    }
                }
            }
        }
        tree.push((x, y, flow.value));
    }
    let label: Vec<usize> = terms
        .iter()
        .map(|t| t.first().copied())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Internal("supernode without terminal".into()))?;
    let mut assignment = vec![0; n];
    for (i, mem) in members.iter().enumerate() {
        for &v in mem {
            assignment[v] = label[i];
        }
    }
    let edges = tree.iter().map(|&(a, b, w)| TreeEdge { a: label[a], b: label[b], w }).collect();
    SteinerGHTree::new(label, edges, assignment)
}

/// Supernodes reachable from `start` without passing through `block`.
fn subtree(tree: &[(usize, usize, u64)], start: usize, block: usize, count: usize) -> Vec<usize> {
    let mut seen = vec![false; count];
    seen[start] = true;
    seen[block] = true;
    let mut stack = vec![start];
    let mut out = vec![start];
    while let Some(x) = stack.pop() {
        for &(a, b, _) in tree {
            let y = if a == x {
                b
            } else if b == x {
                a
            } else {
                continue;
            };
            if !seen[y] {
                seen[y] = true;
                out.push(y);
                stack.push(y);
            }
        }
    }
    out
}

/// Partition of `U` into classes of the relation `lambda(s, t) >= tau`,
/// checked to be an equivalence. Classes are sorted, ordered by their
/// smallest member.
pub fn component_census(metrics: &mut Metrics, g: &Graph, u: &TerminalSet, tau: u64) -> Result<Vec<Vec<Vertex>>> {
    let lam = pairwise_lambda(metrics, g, u)?;
    census_from_matrix(u, &lam, tau)
}

/// [`component_census`] from a precomputed connectivity matrix.
pub fn census_from_matrix(u: &TerminalSet, lam: &[Vec<u64>], tau: u64) -> Result<Vec<Vec<Vertex>>> {
    let m = u.members();
    let k = m.len();
    let mut class = vec![usize::MAX; k];
    let mut out: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..k {
        if class[i] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![i];
        class[i] = id;
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            for y in 0..k {
                if class[y] == usize::MAX && lam[x][y] >= tau {
                    class[y] = id;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
        for &a in &members {
            for &b in &members {
                if a != b && lam[a][b] < tau {
                    return internal("connectivity threshold relation is not transitive");
                }
            }
        }
        members.sort_unstable();
        out.push(members.into_iter().map(|i| m[i]).collect());
    }
    Ok(out)
}
