//! Exact s-t maxflow (Dinic's blocking flows) with extraction of the
//! vertex-minimal mincut sides.
//!
//! Undirected edges become a pair of opposite arcs that are each other's
//! residual twin. Arcs are scanned in insertion order, which follows the
//! input edge order, so every run on the same input is identical.

use std::collections::VecDeque;

use crate::error::{invalid, Result};
use crate::graph::{Graph, Vertex};
use crate::metrics::Metrics;

/// Value of a maxflow and the unique vertex-minimal source-side mincut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: u64,
    pub min_source_side: Vec<Vertex>,
}

/// A residual network over `0..n` with `u64` capacities.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    edges: usize,
    level: Vec<u32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> FlowNetwork {
        FlowNetwork {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            edges: 0,
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges added, each counted once.
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    fn push_pair(&mut self, u: usize, v: usize, forward: u64, backward: u64) {
        let a = self.to.len();
        self.to.push(v);
        self.cap.push(forward);
        self.to.push(u);
        self.cap.push(backward);
        self.adj[u].push(a);
        self.adj[v].push(a + 1);
        self.edges += 1;
    }

    pub fn add_undirected(&mut self, u: usize, v: usize, cap: u64) {
        self.push_pair(u, v, cap, cap);
    }

    pub fn add_directed(&mut self, u: usize, v: usize, cap: u64) {
        self.push_pair(u, v, cap, 0);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &a in &self.adj[x] {
                let y = self.to[a];
                if self.cap[a] > 0 && self.level[y] == u32::MAX {
                    self.level[y] = self.level[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, x: usize, t: usize, limit: u64) -> u64 {
        if x == t {
            return limit;
        }
        while self.iter[x] < self.adj[x].len() {
            let a = self.adj[x][self.iter[x]];
            let y = self.to[a];
            if self.cap[a] > 0 && self.level[y] == self.level[x] + 1 {
                let pushed = self.dfs(y, t, limit.min(self.cap[a]));
                if pushed > 0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            self.iter[x] += 1;
        }
        0
    }

    /// Runs to completion and returns the flow value. Counted in `metrics`.
    pub fn max_flow(&mut self, metrics: &mut Metrics, s: usize, t: usize) -> u64 {
        metrics.record_maxflow(self.vertex_count(), self.edge_count());
        let mut total = 0u64;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Vertices reachable from `s` in the residual network.
    pub fn source_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &a in &self.adj[x] {
                let y = self.to[a];
                if self.cap[a] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Vertices that can reach `t` in the residual network.
    pub fn sink_coreachable(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(y) = stack.pop() {
            for &b in &self.adj[y] {
                let x = self.to[b];
                if self.cap[b ^ 1] > 0 && !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen
    }
}

/// A maxflow between two vertex groups of a graph, with both minimal sides.
#[derive(Clone, Debug)]
pub struct GroupFlow {
    pub value: u64,
    /// Vertex-minimal side containing the sources.
    pub source_side: Vec<Vertex>,
    /// Vertex-minimal side containing the sinks.
    pub sink_side: Vec<Vertex>,
}

fn check_groups(g: &Graph, sources: &[Vertex], sinks: &[Vertex]) -> Result<Vec<u8>> {
    if sources.is_empty() || sinks.is_empty() {
        return invalid("maxflow needs nonempty sources and sinks");
    }
    let mut role = vec![0u8; g.n()];
    for &s in sources {
        if s >= g.n() {
            return invalid(format!("source {s} out of range"));
        }
        role[s] = 1;
    }
    for &t in sinks {
        if t >= g.n() {
            return invalid(format!("sink {t} out of range"));
        }
        if role[t] == 1 {
            return invalid(format!("vertex {t} is both source and sink"));
        }
        role[t] = 2;
    }
    Ok(role)
}

/// Maxflow from `sources` to `sinks`, returning both vertex-minimal sides.
pub fn group_flow(
    metrics: &mut Metrics,
    g: &Graph,
    sources: &[Vertex],
    sinks: &[Vertex],
) -> Result<GroupFlow> {
    let role = check_groups(g, sources, sinks)?;
    let n = g.n();
    let single = sources.len() == 1 && sinks.len() == 1;
    let mut net = FlowNetwork::new(if single { n } else { n + 2 });
    for e in g.edges() {
        net.add_undirected(e.u, e.v, e.w);
    }
    let (s, t) = if single {
        (sources[0], sinks[0])
    } else {
        // effectively infinite: exceeds every cut of g
        let big = g.total_weight() + 1;
        for v in 0..n {
            match role[v] {
                1 => net.add_directed(n, v, big),
                2 => net.add_directed(v, n + 1, big),
                _ => {}
            }
        }
        (n, n + 1)
    };
    let value = net.max_flow(metrics, s, t);
    let src = net.source_reachable(s);
    let snk = net.sink_coreachable(t);
    Ok(GroupFlow {
        value,
        source_side: (0..n).filter(|&v| src[v]).collect(),
        sink_side: (0..n).filter(|&v| snk[v]).collect(),
    })
}

/// Exact maxflow value and the vertex-minimal source-side mincut.
pub fn max_flow(
    metrics: &mut Metrics,
    g: &Graph,
    sources: &[Vertex],
    sinks: &[Vertex],
) -> Result<FlowResult> {
    let flow = group_flow(metrics, g, sources, sinks)?;
    Ok(FlowResult {
        value: flow.value,
        min_source_side: flow.source_side,
    })
}

/// `(vertices, edges)` of a maxflow instance.
pub fn instance_size(g: &Graph) -> (usize, usize) {
    (g.n(), g.m())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Graph::new(2, [(0, 1, 7)]).unwrap();
        let r = max_flow(&mut Metrics::new(), &g, &[0], &[1]).unwrap();
        assert_eq!(r.value, 7);
        assert_eq!(r.min_source_side, vec![0]);
    }

    #[test]
    fn path_minimal_side() {
        let g = Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let r = max_flow(&mut Metrics::new(), &g, &[0], &[2]).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.min_source_side, vec![0]);
    }

    #[test]
    fn k4_pair() {
        let r = max_flow(&mut Metrics::new(), &k4(), &[0], &[1]).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.min_source_side, vec![0]);
    }

    #[test]
    fn group_sides_are_minimal_on_both_ends() {
        let g = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let f = group_flow(&mut Metrics::new(), &g, &[0], &[3]).unwrap();
        assert_eq!(f.value, 1);
        assert_eq!(f.source_side, vec![0]);
        assert_eq!(f.sink_side, vec![3]);
    }

    #[test]
    fn multi_terminal() {
        let g = Graph::new(4, [(0, 1, 2), (1, 2, 1), (2, 3, 2)]).unwrap();
        let r = max_flow(&mut Metrics::new(), &g, &[0, 1], &[3]).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.min_source_side, vec![0, 1]);
    }

    #[test]
    fn rejects_overlap_and_empty() {
        let g = k4();
        assert!(max_flow(&mut Metrics::new(), &g, &[0], &[0]).is_err());
        assert!(max_flow(&mut Metrics::new(), &g, &[], &[1]).is_err());
    }

    #[test]
    fn counted_once_per_call() {
        let mut m = Metrics::new();
        max_flow(&mut m, &k4(), &[0], &[1]).unwrap();
        max_flow(&mut m, &k4(), &[0, 2], &[1]).unwrap();
        assert_eq!(m.maxflow_calls, 2);
    }

    #[test]
    fn sizes() {
        assert_eq!(instance_size(&Graph::new(0, []).unwrap()), (0, 0));
        assert_eq!(instance_size(&k4()), (4, 6));
        assert_eq!(instance_size(&Graph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap()), (3, 2));
    }
}
