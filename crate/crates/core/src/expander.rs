//! Expander decomposition with respect to a vertex demand vector.
//!
//! A demand decomposition is reduced to a volume decomposition by adding a
//! self-loop of weight `ceil(W d(v) / D)` to every vertex and scaling the
//! expansion parameter to `D phi / W`. The volume decomposition itself is a
//! recursive cutting procedure: a cluster is split along any cut whose
//! conductance falls below the target, found by exhaustive enumeration on
//! small clusters and by a spectral sweep on larger ones. A cluster is only
//! accepted with a certificate: the enumeration itself, or a single-sink
//! flow in which every vertex `v` sends `phi * mu(v)` units to a center.
//! Such a flow crosses every cut `S` not containing the center with at least
//! `phi * mu(S)` units, which bounds `w(∂S)` from below.
//!
//! Maxflows run inside the decomposition backend are part of the
//! decomposition and are not recorded as maxflow calls; the boundary
//! feasibility flows of [`trim_boundary_linked`] are.

use serde::{Deserialize, Serialize};

use crate::error::{internal, invalid, Error, Result};
use crate::graph::{DemandVector, Graph, Vertex};
use crate::maxflow::FlowNetwork;
use crate::metrics::Metrics;
use crate::params::Params;
use crate::ratio::Ratio;

/// How a cluster was shown to be an expander.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Fewer than two vertices of positive measure: no admissible cut.
    Vacuous,
    /// Every cut enumerated.
    Exhaustive,
    /// A feasible single-sink flow.
    Flow,
    /// Connected with every edge at least `phi` times half the measure.
    Connected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub clusters: Vec<Vec<Vertex>>,
    pub certificates: Vec<Certificate>,
    pub phi: Ratio,
    pub intercluster_weight: u64,
    pub q_factor: u64,
    /// Clusters whose boundary flow problem stays infeasible even after
    /// trimming (indices into `clusters`).
    pub unlinked: Vec<usize>,
}

impl Decomposition {
    /// Recomputes the weight of edges joining different clusters.
    pub fn recompute_intercluster(g: &Graph, clusters: &[Vec<Vertex>]) -> u64 {
        let mut label = vec![usize::MAX; g.n()];
        for (i, c) in clusters.iter().enumerate() {
            for &v in c {
                label[v] = i;
            }
        }
        g.edges().iter().filter(|e| label[e.u] != label[e.v]).map(|e| e.w).sum()
    }

    /// Checks that the clusters partition `0..n` and the stored weight.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut seen = vec![false; g.n()];
        for c in &self.clusters {
            if c.is_empty() {
                return internal("empty cluster");
            }
            for &v in c {
                if v >= g.n() || seen[v] {
                    return internal(format!("vertex {v} repeated or out of range"));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return internal("clusters do not cover the vertex set");
        }
        if Decomposition::recompute_intercluster(g, &self.clusters) != self.intercluster_weight {
            return internal("intercluster weight mismatch");
        }
        Ok(())
    }
}

/// Outcome of [`certify_cluster`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certification {
    pub expander: bool,
    /// `false` when a negative answer comes from a conservative test.
    pub exact: bool,
}

/// A vertex subset with local ids, internal adjacency and a measure.
struct Local {
    verts: Vec<Vertex>,
    adj: Vec<Vec<(usize, u64)>>,
    mu: Vec<u128>,
}

impl Local {
    fn build(g: &Graph, set: &[Vertex], mu: &dyn Fn(Vertex) -> u128, index: &mut [usize]) -> Local {
        for (i, &v) in set.iter().enumerate() {
            index[v] = i;
        }
        let mut adj = vec![Vec::new(); set.len()];
        for (i, &v) in set.iter().enumerate() {
            for &(x, w) in g.neighbors(v) {
                let j = index[x];
                if j != usize::MAX {
                    adj[i].push((j, w));
                }
            }
        }
        let mu_local = set.iter().map(|&v| mu(v)).collect();
        for &v in set {
            index[v] = usize::MAX;
        }
        Local { verts: set.to_vec(), adj, mu: mu_local }
    }

    fn len(&self) -> usize {
        self.verts.len()
    }

    fn total_mu(&self) -> u128 {
        self.mu.iter().sum()
    }

    fn positive(&self) -> usize {
        self.mu.iter().filter(|&&m| m > 0).count()
    }

    /// Any cut of a connected cluster weighs at least its lightest edge, so
    /// `phi * mu(X) <= 2 * w_min` rules out every violating cut.
    fn light_measure(&self, phi: Ratio) -> bool {
        let Some(w_min) = self.adj.iter().flatten().map(|&(_, w)| w).min() else {
            return false;
        };
        self.components().len() == 1 && !phi.exceeds_fraction(2 * w_min as u128, self.total_mu())
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut members = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    fn cut_of(&self, side: &[bool]) -> (u64, u128) {
        let mut cut = 0u64;
        let mut mu = 0u128;
        for i in 0..self.len() {
            if side[i] {
                mu += self.mu[i];
                for &(j, w) in &self.adj[i] {
                    if !side[j] {
                        cut += w;
                    }
                }
            }
        }
        (cut, mu)
    }
}

/// A cut given by its side mask, boundary weight and the smaller measure.
#[derive(Clone, Debug)]
struct LocalCut {
    side: Vec<bool>,
    weight: u64,
    min_mu: u128,
}

/// `w < phi * mu`, exactly.
fn violates(weight: u64, mu: u128, phi: Ratio) -> bool {
    mu > 0 && phi.exceeds_fraction(weight as u128, mu)
}

/// `a/b < c/d` for positive `b`, `d`.
fn ratio_less(a: u64, b: u128, c: u64, d: u128) -> bool {
    (a as u128).saturating_mul(d) < (c as u128).saturating_mul(b)
}

/// Minimum-conductance admissible cut by Gray-code enumeration of all
/// bipartitions. The last vertex stays outside `S`.
fn exhaustive_min(loc: &Local) -> Option<LocalCut> {
    let k = loc.len();
    if k < 2 {
        return None;
    }
    let total = loc.total_mu();
    let mut side = vec![false; k];
    let mut cut = 0u64;
    let mut mu_s = 0u128;
    let mut best: Option<(u64, u128, u64)> = None;
    let mut code = 0u64;
    for step in 1u64..(1u64 << (k - 1)) {
        let i = step.trailing_zeros() as usize;
        for &(j, w) in &loc.adj[i] {
            if side[j] == side[i] {
                cut += w;
            } else {
                cut -= w;
            }
        }
        side[i] = !side[i];
        if side[i] {
            mu_s += loc.mu[i];
        } else {
            mu_s -= loc.mu[i];
        }
        code ^= 1 << i;
        let min_mu = mu_s.min(total - mu_s);
        if min_mu == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bc, bm, bcode)) => {
                ratio_less(cut, min_mu, bc, bm) || (!ratio_less(bc, bm, cut, min_mu) && code < bcode)
            }
        };
        if better {
            best = Some((cut, min_mu, code));
        }
    }
    best.map(|(weight, min_mu, code)| LocalCut {
        side: (0..k).map(|i| (code >> i) & 1 == 1).collect(),
        weight,
        min_mu,
    })
}

/// Best prefix cut of the order given by an approximate second eigenvector
/// of the measure-normalized Laplacian. Every vertex must have positive
/// measure.
fn sweep_cut(loc: &Local, iterations: usize) -> Option<LocalCut> {
    let k = loc.len();
    if k < 2 {
        return None;
    }
    let mu: Vec<f64> = loc.mu.iter().map(|&m| m as f64).collect();
    let sq: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let diag: Vec<f64> = loc.adj.iter().map(|a| a.iter().map(|&(_, w)| w as f64).sum()).collect();
    // B = c I - M^{-1/2} L M^{-1/2} has the same eigenvectors, top one being sqrt(mu)
    let c = (0..k).map(|i| 2.0 * diag[i] / mu[i]).fold(0.0f64, f64::max) + 1e-9;
    let unorm: f64 = mu.iter().sum::<f64>();
    let start = (0..k)
        .max_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap().then(b.cmp(&a)))
        .expect("nonempty");
    let mut y: Vec<f64> = (0..k)
        .map(|i| (if i == start { 1.0 } else { 0.0 } - 1.0 / k as f64) * sq[i])
        .collect();
    let project = |y: &mut Vec<f64>| {
        let dot: f64 = y.iter().zip(&sq).map(|(a, b)| a * b).sum();
        for (yi, si) in y.iter_mut().zip(&sq) {
            *yi -= dot / unorm * si;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-9 {
            y.iter_mut().for_each(|v| *v /= norm);
            true
        } else {
            false
        }
    };
    if !project(&mut y) {
        return None;
    }
    let mut next = vec![0.0; k];
    for _ in 0..iterations {
        for i in 0..k {
            let xi = y[i] / sq[i];
            let mut lx = diag[i] * xi;
            for &(j, w) in &loc.adj[i] {
                lx -= w as f64 * y[j] / sq[j];
            }
            next[i] = c * y[i] - lx / sq[i];
        }
        std::mem::swap(&mut y, &mut next);
        if !project(&mut y) {
            break;
        }
    }
    let x: Vec<f64> = (0..k).map(|i| y[i] / sq[i]).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let total = loc.total_mu();
    let mut side = vec![false; k];
    let mut cut = 0u64;
    let mut mu_s = 0u128;
    let mut best: Option<(u64, u128, usize)> = None;
    for (pos, &i) in order.iter().enumerate().take(k - 1) {
        for &(j, w) in &loc.adj[i] {
            if side[j] {
                cut -= w;
            } else {
                cut += w;
            }
        }
        side[i] = true;
        mu_s += loc.mu[i];
        let min_mu = mu_s.min(total - mu_s);
        if min_mu == 0 {
            continue;
        }
        if best.is_none_or(|(bc, bm, _)| ratio_less(cut, min_mu, bc, bm)) {
            best = Some((cut, min_mu, pos));
        }
    }
    best.map(|(weight, min_mu, pos)| {
        let mut side = vec![false; k];
        for &i in &order[..=pos] {
            side[i] = true;
        }
        LocalCut { side, weight, min_mu }
    })
}

enum FlowCheck {
    Certified,
    /// A set not containing the center with `w(∂A) < phi * mu(A)`.
    Cut(LocalCut),
}

/// Routes `phi * mu(v)` from every vertex to `center` inside the cluster.
fn flow_certificate(loc: &Local, phi: Ratio, center: usize) -> Result<FlowCheck> {
    let k = loc.len();
    let src = k;
    let mut net = FlowNetwork::new(k + 1);
    let fit = |x: u128| -> Result<u64> {
        u64::try_from(x).map_err(|_| Error::Overflow("flow certificate capacity".into()))
    };
    for i in 0..k {
        for &(j, w) in &loc.adj[i] {
            if i < j {
                net.add_undirected(i, j, fit(w as u128 * phi.denom())?);
            }
        }
    }
    let mut demand = 0u128;
    for i in 0..k {
        if i != center && loc.mu[i] > 0 {
            let cap = loc.mu[i] * phi.numer();
            demand += cap;
            net.add_directed(src, i, fit(cap)?);
        }
    }
    fit(demand)?;
    let mut scratch = Metrics::new();
    let value = net.max_flow(&mut scratch, src, center);
    if value as u128 == demand {
        return Ok(FlowCheck::Certified);
    }
    let reach = net.source_reachable(src);
    let side: Vec<bool> = (0..k).map(|i| reach[i]).collect();
    let (weight, mu_a) = loc.cut_of(&side);
    let min_mu = mu_a.min(loc.total_mu() - mu_a);
    debug_assert!(violates(weight, mu_a, phi));
    Ok(FlowCheck::Cut(LocalCut { side, weight, min_mu }))
}

/// Centers tried by the flow certificate: largest measure first.
fn centers(loc: &Local) -> Vec<usize> {
    let mut order: Vec<usize> = (0..loc.len()).filter(|&i| loc.mu[i] > 0).collect();
    order.sort_by(|&a, &b| loc.mu[b].cmp(&loc.mu[a]).then(a.cmp(&b)));
    order.truncate(3);
    order
}

enum Verdict {
    Accept(Certificate),
    Split(Vec<bool>),
}

fn judge(params: &Params, loc: &Local, phi: Ratio) -> Result<Verdict> {
    if loc.positive() < 2 {
        return Ok(Verdict::Accept(Certificate::Vacuous));
    }
    if loc.light_measure(phi) {
        return Ok(Verdict::Accept(Certificate::Connected));
    }
    if loc.len() <= params.exhaustive_limit {
        return Ok(match exhaustive_min(loc) {
            Some(c) if violates(c.weight, c.min_mu, phi) => Verdict::Split(c.side),
            _ => Verdict::Accept(Certificate::Exhaustive),
        });
    }
    if let Some(c) = sweep_cut(loc, params.sweep_iterations) {
        if violates(c.weight, c.min_mu, phi) {
            return Ok(Verdict::Split(c.side));
        }
    }
    let mut fallback: Option<LocalCut> = None;
    for center in centers(loc) {
        match flow_certificate(loc, phi, center)? {
            FlowCheck::Certified => return Ok(Verdict::Accept(Certificate::Flow)),
            FlowCheck::Cut(c) => {
                if violates(c.weight, c.min_mu, phi) {
                    return Ok(Verdict::Split(c.side));
                }
                fallback.get_or_insert(c);
            }
        }
    }
    // No certificate: split along a cut that is sparse relative to its own
    // side, which keeps every accepted cluster certified.
    match fallback {
        Some(c) => Ok(Verdict::Split(c.side)),
        None => internal("flow certificate produced no cut"),
    }
}

/// Recursive cutting of `set` with respect to measure `mu` at `phi`.
fn decompose_measure(
    params: &Params,
    g: &Graph,
    mu: &dyn Fn(Vertex) -> u128,
    phi: Ratio,
    set: Vec<Vertex>,
) -> Result<Vec<(Vec<Vertex>, Certificate)>> {
    let mut index = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    let mut stack = vec![set];
    while let Some(x) = stack.pop() {
        if x.len() == 1 {
            out.push((x, Certificate::Vacuous));
            continue;
        }
        let loc = Local::build(g, &x, mu, &mut index);
        let comps = loc.components();
        if comps.len() > 1 {
            for c in comps.into_iter().rev() {
                stack.push(c.into_iter().map(|i| loc.verts[i]).collect());
            }
            continue;
        }
        match judge(params, &loc, phi)? {
            Verdict::Accept(cert) => out.push((x, cert)),
            Verdict::Split(side) => {
                let a: Vec<Vertex> = (0..loc.len()).filter(|&i| side[i]).map(|i| loc.verts[i]).collect();
                let b: Vec<Vertex> = (0..loc.len()).filter(|&i| !side[i]).map(|i| loc.verts[i]).collect();
                if a.is_empty() || b.is_empty() {
                    return internal("degenerate split in expander decomposition");
                }
                stack.push(b);
                stack.push(a);
            }
        }
    }
    out.sort_by_key(|(c, _)| c[0]);
    Ok(out)
}

fn check_phi(phi: Ratio) -> Result<()> {
    if phi.is_zero() {
        return invalid("phi must be positive");
    }
    Ok(())
}

/// `G'` with self-loops `ceil(W d(v) / D)` and `phi' = D phi / W`.
pub fn reduce_demand_to_standard(g: &Graph, d: &DemandVector, phi: Ratio) -> Result<(Graph, Ratio)> {
    if d.len() != g.n() {
        return invalid("demand vector length differs from vertex count");
    }
    let big_d = d.total() as u128;
    let big_w = g.total_weight() as u128;
    if big_d == 0 {
        return invalid("total demand is zero");
    }
    if big_w == 0 {
        return invalid("graph has zero total weight");
    }
    let mut loops = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let l = (big_w * d.get(v) as u128).div_ceil(big_d);
        loops.push(u64::try_from(l).map_err(|_| Error::Overflow("self-loop weight".into()))?);
    }
    let gp = g.with_added_loops(&loops)?;
    let phi_p = Ratio::new(
        phi.numer().checked_mul(big_d).ok_or_else(|| Error::Overflow("phi'".into()))?,
        phi.denom().checked_mul(big_w).ok_or_else(|| Error::Overflow("phi'".into()))?,
    )?;
    Ok((gp, phi_p))
}

/// `ExpanderDecomp(G, d, phi)`.
pub fn expander_decompose(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    d: &DemandVector,
    phi: Ratio,
) -> Result<Decomposition> {
    check_phi(phi)?;
    if d.len() != g.n() {
        return invalid("demand vector length differs from vertex count");
    }
    if d.total() == 0 {
        return invalid("total demand is zero");
    }
    let q_factor = params.q(g.n());
    if g.total_weight() == 0 {
        metrics.record_ed(g.n(), 0);
        let clusters: Vec<Vec<Vertex>> = (0..g.n()).map(|v| vec![v]).collect();
        let certificates = vec![Certificate::Vacuous; g.n()];
        return Ok(Decomposition { clusters, certificates, phi, intercluster_weight: 0, q_factor, unlinked: Vec::new() });
    }
    let (gp, phi_p) = reduce_demand_to_standard(g, d, phi)?;
    metrics.record_ed(gp.n(), gp.m());
    let vol = |v: Vertex| gp.volume(v) as u128;
    let pieces = decompose_measure(params, &gp, &vol, phi_p, (0..g.n()).collect())?;
    let (clusters, certificates): (Vec<_>, Vec<_>) = pieces.into_iter().unzip();
    let intercluster_weight = Decomposition::recompute_intercluster(g, &clusters);
    Ok(Decomposition { clusters, certificates, phi, intercluster_weight, q_factor, unlinked: Vec::new() })
}

/// How `G[cluster]` is shown to be a `phi`-expander with respect to `d`,
/// `Ok(None)` when a violating cut exists, `Err(())` when neither is found.
fn certificate_of(params: &Params, g: &Graph, cluster: &[Vertex], d: &DemandVector, phi: Ratio) -> std::result::Result<Option<Certificate>, ()> {
    let mut index = vec![usize::MAX; g.n()];
    let mu = |v: Vertex| d.get(v) as u128;
    let loc = Local::build(g, cluster, &mu, &mut index);
    if loc.positive() < 2 {
        return Ok(Some(Certificate::Vacuous));
    }
    if loc.light_measure(phi) {
        return Ok(Some(Certificate::Connected));
    }
    if loc.len() <= params.exhaustive_limit {
        return Ok(match exhaustive_min(&loc) {
            Some(c) if violates(c.weight, c.min_mu, phi) => None,
            _ => Some(Certificate::Exhaustive),
        });
    }
    // every center is tried on clusters of moderate size, so a certificate
    // found under a larger measure is found again here
    let mut order = centers(&loc);
    if loc.len() <= params.flow_certify_limit {
        let mut rest: Vec<usize> = (0..loc.len()).filter(|&i| loc.mu[i] > 0 && !order.contains(&i)).collect();
        let deg = |i: usize| loc.adj[i].iter().map(|&(_, w)| w).sum::<u64>();
        rest.sort_by(|&a, &b| deg(b).cmp(&deg(a)).then(a.cmp(&b)));
        order.extend(rest);
    }
    for center in order {
        match flow_certificate(&loc, phi, center) {
            Ok(FlowCheck::Certified) => return Ok(Some(Certificate::Flow)),
            Ok(FlowCheck::Cut(c)) if violates(c.weight, c.min_mu, phi) => return Ok(None),
            _ => {}
        }
    }
    Err(())
}

/// Whether `G[cluster]` is a `phi`-expander with respect to `d`.
pub fn certify_cluster(params: &Params, g: &Graph, cluster: &[Vertex], d: &DemandVector, phi: Ratio) -> Certification {
    match certificate_of(params, g, cluster, d, phi) {
        Ok(c) => Certification { expander: c.is_some(), exact: true },
        Err(()) => Certification { expander: false, exact: false },
    }
}

/// Boundary mass of every vertex of `cluster`, and whether the feasibility
/// flow of the cluster routes it all. Returns the source-side minimal cut of
/// the flow when it does not.
fn boundary_flow(
    metrics: &mut Metrics,
    g: &Graph,
    cluster: &[Vertex],
    d: &DemandVector,
    phi: Ratio,
    q: u64,
) -> Result<Option<Vec<Vertex>>> {
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in cluster.iter().enumerate() {
        index[v] = i;
    }
    let k = cluster.len();
    let (src, snk) = (k, k + 1);
    let mut net = FlowNetwork::new(k + 2);
    let fit = |x: u128| -> Result<u64> {
        u64::try_from(x).map_err(|_| Error::Overflow("boundary flow capacity".into()))
    };
    let mut mass = 0u128;
    for (i, &v) in cluster.iter().enumerate() {
        let mut boundary = 0u128;
        for &(x, w) in g.neighbors(v) {
            let j = index[x];
            if j == usize::MAX {
                boundary += w as u128;
            } else if i < j {
                net.add_undirected(i, j, fit(w as u128 * q as u128 * phi.denom())?);
            }
        }
        if boundary > 0 {
            let cap = boundary * phi.denom();
            mass += cap;
            net.add_directed(src, i, fit(cap)?);
        }
        let sink = q as u128 * phi.numer() * d.get(v) as u128;
        if sink > 0 {
            net.add_directed(i, snk, fit(sink)?);
        }
    }
    if mass == 0 {
        return Ok(None);
    }
    fit(mass)?;
    let value = net.max_flow(metrics, src, snk);
    if value as u128 == mass {
        return Ok(None);
    }
    let reach = net.source_reachable(src);
    Ok(Some((0..k).filter(|&i| reach[i]).map(|i| cluster[i]).collect()))
}

/// Whether the boundary flow problem of `cluster` is feasible.
pub fn boundary_linked(metrics: &mut Metrics, g: &Graph, cluster: &[Vertex], d: &DemandVector, phi: Ratio, q: u64) -> Result<bool> {
    Ok(boundary_flow(metrics, g, cluster, d, phi, q)?.is_none())
}

/// Decomposition of `G[set]`, in parent ids.
fn redecompose(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    d: &DemandVector,
    phi: Ratio,
    set: &[Vertex],
) -> Result<Vec<(Vec<Vertex>, Certificate)>> {
    let sub = g.induced(set);
    let sub_d = d.restrict(set);
    if sub_d.total() == 0 {
        return Ok(vec![(set.to_vec(), Certificate::Vacuous)]);
    }
    let sd = expander_decompose(metrics, params, &sub.graph, &sub_d, phi)?;
    Ok(sd
        .clusters
        .into_iter()
        .zip(sd.certificates)
        .map(|(c, ct)| (c.into_iter().map(|v| sub.to_parent[v]).collect(), ct))
        .collect())
}

/// Folds each cluster whose boundary flow stays infeasible into an adjacent
/// cluster, heaviest connection first, when the union is a certified
/// expander with a feasible boundary flow.
fn merge_unlinked(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    d: &DemandVector,
    phi: Ratio,
    q: u64,
    done: &mut Vec<(Vec<Vertex>, Certificate, bool)>,
) -> Result<()> {
    'restart: loop {
        let mut label = vec![usize::MAX; g.n()];
        for (i, (c, _, _)) in done.iter().enumerate() {
            for &v in c {
                label[v] = i;
            }
        }
        for i in 0..done.len() {
            if done[i].2 {
                continue;
            }
            let mut weight: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
            for &v in &done[i].0 {
                for &(x, w) in g.neighbors(v) {
                    if label[x] != i {
                        *weight.entry(label[x]).or_default() += w;
                    }
                }
            }
            let mut cand: Vec<(usize, u64)> = weight.into_iter().collect();
            cand.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            for (j, _) in cand {
                let mut union = done[i].0.clone();
                union.extend_from_slice(&done[j].0);
                union.sort_unstable();
                let Ok(Some(cert)) = certificate_of(params, g, &union, d, phi) else {
                    continue;
                };
                if boundary_flow(metrics, g, &union, d, phi, q)?.is_none() {
                    done[j] = (union, cert, true);
                    done.remove(i);
                    continue 'restart;
                }
            }
        }
        return Ok(());
    }
}

/// Trims clusters until each boundary flow problem is feasible. Removed
/// vertices are decomposed again and their clusters checked in turn.
/// Clusters that cannot shrink further are listed in `unlinked`.
pub fn trim_boundary_linked(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    dec: &Decomposition,
    d: &DemandVector,
    phi: Ratio,
) -> Result<Decomposition> {
    let q = dec.q_factor;
    let mut queue: Vec<(Vec<Vertex>, Certificate)> = dec
        .clusters
        .iter()
        .cloned()
        .zip(dec.certificates.iter().copied())
        .rev()
        .collect();
    let mut done: Vec<(Vec<Vertex>, Certificate, bool)> = Vec::new();
    let guard = 4 * g.n() + 8;
    let mut steps = 0;
    while let Some((x, cert)) = queue.pop() {
        steps += 1;
        if steps > guard {
            return internal("boundary trimming did not terminate");
        }
        match boundary_flow(metrics, g, &x, d, phi, q)? {
            None => done.push((x, cert, true)),
            Some(a) if a.len() == x.len() => done.push((x, cert, false)),
            Some(a) => {
                let mut removed = vec![false; g.n()];
                for &v in &a {
                    removed[v] = true;
                }
                let rest: Vec<Vertex> = x.iter().copied().filter(|&v| !removed[v]).collect();
                // both parts are decomposed again: deleting vertices can
                // break the expansion of the remainder
                let mut pieces = redecompose(metrics, params, g, d, phi, &a)?;
                pieces.extend(redecompose(metrics, params, g, d, phi, &rest)?);
                for p in pieces.into_iter().rev() {
                    queue.push(p);
                }
            }
        }
    }
    merge_unlinked(metrics, params, g, d, phi, q, &mut done)?;
    done.sort_by_key(|(c, _, _)| c[0]);
    let mut clusters = Vec::with_capacity(done.len());
    let mut certificates = Vec::with_capacity(done.len());
    let mut unlinked = Vec::new();
    for (i, (mut c, cert, ok)) in done.into_iter().enumerate() {
        c.sort_unstable();
        clusters.push(c);
        certificates.push(cert);
        if !ok {
            unlinked.push(i);
        }
    }
    let intercluster_weight = Decomposition::recompute_intercluster(g, &clusters);
    Ok(Decomposition { clusters, certificates, phi, intercluster_weight, q_factor: q, unlinked })
}
