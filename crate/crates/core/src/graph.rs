//! Contraction-aware undirected multigraphs with positive integer weights.
//!
//! Vertex ids are dense `0..n`. Every vertex carries the set of original
//! vertices it stands for, so results computed on contracted instances can be
//! mapped back to the input graph. Self-loops never contribute to cuts; they
//! are kept in a separate per-vertex table and only count toward volume.

use crate::error::{invalid, Error, Result};
use crate::maxflow;
use crate::metrics::Metrics;

pub type Vertex = usize;

/// Default ceiling on input edge weights.
pub const DEFAULT_WEIGHT_CEILING: u64 = 1_000_000_000;

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub w: u64,
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    loops: Vec<u64>,
    provenance: Vec<Vec<Vertex>>,
    offsets: Vec<usize>,
    adj: Vec<(Vertex, u64)>,
    degree: Vec<u64>,
    total_weight: u64,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edges == other.edges
            && self.loops == other.loops
            && self.provenance == other.provenance
    }
}

impl Eq for Graph {}

/// Result of [`Graph::contract`]: the quotient graph plus the vertex map.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: Graph,
    /// Old vertex id to new vertex id.
    pub map: Vec<Vertex>,
    /// New vertex id of each input block, in block order.
    pub block_vertex: Vec<Vertex>,
}

/// An induced subgraph and the parent id of each of its vertices.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub to_parent: Vec<Vertex>,
}

impl Graph {
    /// Builds a graph on `0..n` whose vertices are their own originals.
    /// Weights must lie in `1..=DEFAULT_WEIGHT_CEILING`.
    pub fn new<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (Vertex, Vertex, u64)>,
    {
        Graph::with_ceiling(n, edges, DEFAULT_WEIGHT_CEILING)
    }

    pub fn with_ceiling<I>(n: usize, edges: I, ceiling: u64) -> Result<Graph>
    where
        I: IntoIterator<Item = (Vertex, Vertex, u64)>,
    {
        let mut list = Vec::new();
        let mut loops = vec![0u64; n];
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return invalid(format!("edge ({u},{v}) out of range for n={n}"));
            }
            if w == 0 {
                return invalid(format!("edge ({u},{v}) has zero weight"));
            }
            if w > ceiling {
                return invalid(format!("edge ({u},{v}) weight {w} exceeds ceiling {ceiling}"));
            }
            if u == v {
                loops[u] = checked_add(loops[u], w)?;
            } else {
                list.push(Edge { u: u.min(v), v: u.max(v), w });
            }
        }
        let provenance = (0..n).map(|v| vec![v]).collect();
        Graph::assemble(n, list, loops, provenance)
    }

    fn assemble(
        n: usize,
        edges: Vec<Edge>,
        loops: Vec<u64>,
        provenance: Vec<Vec<Vertex>>,
    ) -> Result<Graph> {
        let mut count = vec![0usize; n + 1];
        let mut total_weight = 0u64;
        let mut degree = vec![0u64; n];
        for e in &edges {
            count[e.u + 1] += 1;
            count[e.v + 1] += 1;
            total_weight = checked_add(total_weight, e.w)?;
            degree[e.u] = checked_add(degree[e.u], e.w)?;
            degree[e.v] = checked_add(degree[e.v], e.w)?;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let offsets = count.clone();
        let mut fill = count;
        let mut adj = vec![(0, 0); 2 * edges.len()];
        for e in &edges {
            adj[fill[e.u]] = (e.v, e.w);
            fill[e.u] += 1;
            adj[fill[e.v]] = (e.u, e.w);
            fill[e.v] += 1;
        }
        Ok(Graph {
            n,
            edges,
            loops,
            provenance,
            offsets,
            adj,
            degree,
            total_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of non-loop edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, u64)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `w(∂{v})`, loops excluded.
    pub fn degree(&self, v: Vertex) -> u64 {
        self.degree[v]
    }

    pub fn loop_weight(&self, v: Vertex) -> u64 {
        self.loops[v]
    }

    /// Weighted degree plus retained self-loop weight.
    pub fn volume(&self, v: Vertex) -> u64 {
        self.degree[v] + self.loops[v]
    }

    /// `W`, the sum of non-loop edge weights.
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn provenance(&self, v: Vertex) -> &[Vertex] {
        &self.provenance[v]
    }

    /// Number of original vertices represented.
    pub fn original_count(&self) -> usize {
        self.provenance.iter().map(Vec::len).sum()
    }

    pub fn mask(&self, set: &[Vertex]) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in set {
            mask[v] = true;
        }
        mask
    }

    /// Weight of edges with exactly one endpoint inside `mask`.
    pub fn boundary_weight(&self, mask: &[bool]) -> u64 {
        self.edges
            .iter()
            .filter(|e| mask[e.u] != mask[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// `w(∂S)` for a nonempty proper subset `S`.
    pub fn cut_weight(&self, s: &[Vertex]) -> Result<u64> {
        let mask = self.checked_mask(s)?;
        let size = mask.iter().filter(|&&b| b).count();
        if size == 0 || size == self.n {
            return invalid("cut side must be a nonempty proper subset");
        }
        Ok(self.boundary_weight(&mask))
    }

    fn checked_mask(&self, s: &[Vertex]) -> Result<Vec<bool>> {
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return invalid(format!("vertex {v} out of range"));
        }
        Ok(self.mask(s))
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut comp = vec![s];
            label[s] = id;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in self.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = id;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// `G[set]`; loops of kept vertices are kept.
    pub fn induced(&self, set: &[Vertex]) -> Subgraph {
        let mut local = vec![usize::MAX; self.n];
        let mut to_parent: Vec<Vertex> = set.to_vec();
        to_parent.sort_unstable();
        to_parent.dedup();
        for (i, &v) in to_parent.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| Edge { u: local[e.u], v: local[e.v], w: e.w })
            .collect();
        let loops = to_parent.iter().map(|&v| self.loops[v]).collect();
        let provenance = to_parent.iter().map(|&v| self.provenance[v].clone()).collect();
        let graph = Graph::assemble(to_parent.len(), edges, loops, provenance)
            .expect("subgraph weights are bounded by the parent's");
        Subgraph { graph, to_parent }
    }

    /// Contracts each block to a single vertex, merging parallel edges by
    /// summing weights and dropping edges that become self-loops.
    pub fn contract(&self, blocks: &[Vec<Vertex>]) -> Result<Contraction> {
        self.contract_with(blocks, false)
    }

    /// As [`Graph::contract`]; with `retain_loops` the weight of edges inside a
    /// block is added to the new vertex's self-loop instead of being dropped.
    pub fn contract_with(&self, blocks: &[Vec<Vertex>], retain_loops: bool) -> Result<Contraction> {
        let mut block_of = vec![usize::MAX; self.n];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                if v >= self.n {
                    return invalid(format!("vertex {v} out of range"));
                }
                if block_of[v] != usize::MAX {
                    return invalid(format!("vertex {v} appears in two blocks"));
                }
                block_of[v] = b;
            }
        }
        // New ids follow the order of each group's smallest member.
        let mut map = vec![usize::MAX; self.n];
        let mut block_vertex = vec![usize::MAX; blocks.len()];
        let mut next = 0;
        for v in 0..self.n {
            match block_of[v] {
                usize::MAX => {
                    map[v] = next;
                    next += 1;
                }
                b => {
                    if block_vertex[b] == usize::MAX {
                        block_vertex[b] = next;
                        next += 1;
                    }
                    map[v] = block_vertex[b];
                }
            }
        }
        let n = next;
        let mut provenance: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        let mut loops = vec![0u64; n];
        for v in 0..self.n {
            provenance[map[v]].extend_from_slice(&self.provenance[v]);
            loops[map[v]] = checked_add(loops[map[v]], self.loops[v])?;
        }
        for p in &mut provenance {
            p.sort_unstable();
        }
        let mut mapped: Vec<Edge> = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let (a, b) = (map[e.u], map[e.v]);
            if a == b {
                if retain_loops {
                    loops[a] = checked_add(loops[a], e.w)?;
                }
                continue;
            }
            mapped.push(Edge { u: a.min(b), v: a.max(b), w: e.w });
        }
        let edges = merge_parallel(mapped)?;
        let graph = Graph::assemble(n, edges, loops, provenance)?;
        for &b in &block_vertex {
            if b == usize::MAX {
                // only reachable for an empty block
                return invalid("empty block in contraction");
            }
        }
        Ok(Contraction { graph, map, block_vertex })
    }

    /// Copy of the graph with `extra[v]` added to each vertex's self-loop.
    pub fn with_added_loops(&self, extra: &[u64]) -> Result<Graph> {
        if extra.len() != self.n {
            return invalid("loop vector length differs from vertex count");
        }
        let mut loops = self.loops.clone();
        for (l, &x) in loops.iter_mut().zip(extra) {
            *l = checked_add(*l, x)?;
        }
        Graph::assemble(self.n, self.edges.clone(), loops, self.provenance.clone())
    }

    /// Same graph with parallel copies merged.
    pub fn simplified(&self) -> Graph {
        let edges = merge_parallel(self.edges.clone()).expect("merged weights fit in u64");
        Graph::assemble(self.n, edges, self.loops.clone(), self.provenance.clone())
            .expect("weights unchanged")
    }
}

fn checked_add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b)
        .ok_or_else(|| Error::Overflow(format!("weight sum {a} + {b}")))
}

fn merge_parallel(mut edges: Vec<Edge>) -> Result<Vec<Edge>> {
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    let mut out: Vec<Edge> = Vec::with_capacity(edges.len());
    for e in edges {
        match out.last_mut() {
            Some(last) if last.u == e.u && last.v == e.v => last.w = checked_add(last.w, e.w)?,
            _ => out.push(e),
        }
    }
    Ok(out)
}

/// A set of terminal vertices, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TerminalSet(Vec<Vertex>);

impl TerminalSet {
    pub fn new(mut members: Vec<Vertex>) -> TerminalSet {
        members.sort_unstable();
        members.dedup();
        TerminalSet(members)
    }

    pub fn all(n: usize) -> TerminalSet {
        TerminalSet((0..n).collect())
    }

    /// Checks that every member is a vertex of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self.0.iter().find(|&&v| v >= g.n()) {
            Some(v) => invalid(format!("terminal {v} is not a vertex")),
            None => Ok(()),
        }
    }

    pub fn members(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

/// Nonnegative integer demand per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandVector(Vec<u64>);

impl DemandVector {
    pub fn new(d: Vec<u64>) -> Result<DemandVector> {
        d.iter()
            .try_fold(0u64, |acc, &x| checked_add(acc, x))
            .map(|_| DemandVector(d))
    }

    /// `1_U` on `n` vertices.
    pub fn indicator(n: usize, set: &[Vertex]) -> DemandVector {
        let mut d = vec![0; n];
        for &v in set {
            d[v] = 1;
        }
        DemandVector(d)
    }

    pub fn uniform(n: usize) -> DemandVector {
        DemandVector(vec![1; n])
    }

    /// `d(v) = w(∂{v})`.
    pub fn degrees(g: &Graph) -> DemandVector {
        DemandVector((0..g.n()).map(|v| g.degree(v)).collect())
    }

    pub fn get(&self, v: Vertex) -> u64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// `D = Σ d(v)`.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn sum_over(&self, set: &[Vertex]) -> u64 {
        set.iter().map(|&v| self.0[v]).sum()
    }

    /// Demands of the listed vertices, in order.
    pub fn restrict(&self, set: &[Vertex]) -> DemandVector {
        DemandVector(set.iter().map(|&v| self.0[v]).collect())
    }
}

/// One side of a bipartition with its boundary weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub side: Vec<Vertex>,
    pub boundary_weight: u64,
}

impl Cut {
    pub fn new(g: &Graph, mut side: Vec<Vertex>) -> Result<Cut> {
        side.sort_unstable();
        side.dedup();
        let boundary_weight = g.cut_weight(&side)?;
        Ok(Cut { side, boundary_weight })
    }
}

/// `λ_G(s,t)`, computed with one maxflow.
pub fn connectivity_oracle(metrics: &mut Metrics, g: &Graph, s: Vertex, t: Vertex) -> Result<u64> {
    if s == t {
        return invalid("connectivity of a vertex with itself");
    }
    maxflow::max_flow(metrics, g, &[s], &[t]).map(|f| f.value)
}
