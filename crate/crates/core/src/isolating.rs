//! Isolating cuts: for disjoint groups `U_1..U_h`, a vertex-minimal
//! `(U_i, U_{-i})`-mincut for every `i`, using `ceil(log2 h)` maxflows on the
//! whole graph plus one maxflow per group inside its region.

use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex};
use crate::maxflow::{group_flow, FlowNetwork};
use crate::metrics::Metrics;

/// Cut `S_i` for group `i`, with its weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingCut {
    pub side: Vec<Vertex>,
    pub weight: u64,
}

fn check(g: &Graph, groups: &[Vec<Vertex>]) -> Result<Vec<usize>> {
    if groups.len() < 2 {
        return invalid("isolating cuts need at least two groups");
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (i, grp) in groups.iter().enumerate() {
        if grp.is_empty() {
            return invalid(format!("group {i} is empty"));
        }
        for &v in grp {
            if v >= g.n() {
                return invalid(format!("vertex {v} out of range"));
            }
            if owner[v] != usize::MAX {
                return invalid(format!("vertex {v} lies in two groups"));
            }
            owner[v] = i;
        }
    }
    Ok(owner)
}

/// Source-minimal `(group, outside region)`-mincut inside `region`.
fn local_cut(
    metrics: &mut Metrics,
    g: &Graph,
    region: &[Vertex],
    in_region: &[bool],
    local: &mut [usize],
    group: &[Vertex],
) -> IsolatingCut {
    let k = region.len();
    for (i, &v) in region.iter().enumerate() {
        local[v] = i;
    }
    // local ids: region vertices, then the contracted exterior, then the source
    let ext = k;
    let src = k + 1;
    let mut net = FlowNetwork::new(k + 2);
    for (i, &v) in region.iter().enumerate() {
        let mut outside = 0u64;
        for &(x, w) in g.neighbors(v) {
            if in_region[x] {
                if v < x {
                    net.add_undirected(i, local[x], w);
                }
            } else {
                outside += w;
            }
        }
        if outside > 0 {
            net.add_undirected(i, ext, outside);
        }
    }
    let big = g.total_weight() + 1;
    for &v in group {
        net.add_directed(src, local[v], big);
    }
    let value = net.max_flow(metrics, src, ext);
    let reach = net.source_reachable(src);
    let mut side: Vec<Vertex> = region.iter().enumerate().filter(|&(i, _)| reach[i]).map(|(_, &v)| v).collect();
    side.sort_unstable();
    IsolatingCut { side, weight: value }
}

/// `ComputeIsolatingCuts(G, {U_1..U_h})`.
pub fn isolating_cuts(metrics: &mut Metrics, g: &Graph, groups: &[Vec<Vertex>]) -> Result<Vec<IsolatingCut>> {
    let owner = check(g, groups)?;
    metrics.isolating_cuts_calls += 1;
    let h = groups.len();
    let n = g.n();
    if h == 2 {
        let flow = group_flow(metrics, g, &groups[0], &groups[1])?;
        return Ok(vec![
            IsolatingCut { side: flow.source_side, weight: flow.value },
            IsolatingCut { side: flow.sink_side, weight: flow.value },
        ]);
    }
    let bits = (usize::BITS - (h - 1).leading_zeros()) as usize;
    // region[v] = group index whose region still contains v
    let mut region_of: Vec<usize> = vec![usize::MAX; n];
    let mut alive = vec![true; n];
    for bit in 0..bits {
        let mut zeros = Vec::new();
        let mut ones = Vec::new();
        for (i, grp) in groups.iter().enumerate() {
            if (i >> bit) & 1 == 0 {
                zeros.extend_from_slice(grp);
            } else {
                ones.extend_from_slice(grp);
            }
        }
        let flow = group_flow(metrics, g, &zeros, &ones)?;
        let mut side = vec![2u8; n];
        for &v in &flow.source_side {
            side[v] = 0;
        }
        for &v in &flow.sink_side {
            side[v] = 1;
        }
        // A vertex survives if its side labels agree with one code throughout.
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            if side[v] == 2 {
                alive[v] = false;
                continue;
            }
            let code_bit = side[v] as usize;
            if bit == 0 {
                region_of[v] = code_bit;
            } else {
                region_of[v] |= code_bit << bit;
            }
        }
    }
    let mut regions: Vec<Vec<Vertex>> = vec![Vec::new(); h];
    for v in 0..n {
        if alive[v] && region_of[v] < h {
            regions[region_of[v]].push(v);
        }
    }
    debug_assert!(groups
        .iter()
        .enumerate()
        .all(|(i, grp)| grp.iter().all(|&v| owner[v] == i && region_of[v] == i && alive[v])));
    let mut in_region = vec![false; n];
    let mut local = vec![0usize; n];
    let mut out = Vec::with_capacity(h);
    for (i, region) in regions.iter().enumerate() {
        for &v in region {
            in_region[v] = true;
        }
        out.push(local_cut(metrics, g, region, &in_region, &mut local, &groups[i]));
        for &v in region {
            in_region[v] = false;
        }
    }
    Ok(out)
}
