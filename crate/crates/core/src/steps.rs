//! Subroutines of the recursion: RemoveLeafStep, CutThreshold,
//! DetectLargeCC, the threshold search and Decomp.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use crate::error::{internal, invalid, Result};
use crate::expander::expander_decompose;
use crate::graph::{DemandVector, Graph, TerminalSet, Vertex};
use crate::hitmiss::HitMissFamily;
use crate::isolating::{isolating_cuts, IsolatingCut};
use crate::metrics::Metrics;
use crate::params::Params;
use crate::ratio::Ratio;

/// A cut `S_v` together with the vertex `v` it was computed for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabeledCut {
    pub side: Vec<Vertex>,
    pub owner: Vertex,
    pub weight: u64,
}

/// A `tau`-connected component: its terminals and its vertex set
/// `{v : lambda(r, v) >= tau}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LargeComponent {
    pub tau: u64,
    pub terminals: Vec<Vertex>,
    pub vertices: Vec<Vertex>,
}

/// Memo of isolating-cuts results on one fixed graph, keyed by the list
/// of singleton groups. The computation is deterministic, so a hit returns
/// exactly what the call would have returned.
#[derive(Debug, Default)]
pub struct CutCache {
    disabled: bool,
    map: HashMap<Vec<Vertex>, Vec<IsolatingCut>>,
    families: HashMap<(usize, usize), Rc<HitMissFamily>>,
}

impl CutCache {
    pub fn new(params: &Params) -> CutCache {
        CutCache { disabled: !params.memoize, ..CutCache::default() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn family(&mut self, n: usize, a: usize) -> Result<Rc<HitMissFamily>> {
        if let Some(f) = self.families.get(&(n, a)) {
            return Ok(f.clone());
        }
        let f = Rc::new(HitMissFamily::construct(n, a, 2)?);
        if !self.disabled {
            self.families.insert((n, a), f.clone());
        }
        Ok(f)
    }

    fn cuts(&mut self, metrics: &mut Metrics, g: &Graph, hit: Vec<Vertex>) -> Result<Vec<IsolatingCut>> {
        if let Some(c) = self.map.get(&hit) {
            return Ok(c.clone());
        }
        let groups: Vec<Vec<Vertex>> = hit.iter().map(|&v| vec![v]).collect();
        let cuts = isolating_cuts(metrics, g, &groups)?;
        if !self.disabled {
            self.map.insert(hit, cuts.clone());
        }
        Ok(cuts)
    }
}

/// One isolating-cuts call per family member, kept apart.
fn remove_leaf_batches(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    g: &Graph,
    a_set: &[Vertex],
    l: usize,
    pivot: Option<Vertex>,
) -> Result<Vec<Vec<LabeledCut>>> {
    metrics.remove_leaf_calls += 1;
    if a_set.len() < 2 {
        return Ok(Vec::new());
    }
    let fam = cache.family(a_set.len(), l.max(2))?;
    let pivot_index = match pivot {
        Some(r) => Some(a_set.iter().position(|&x| x == r).ok_or_else(|| {
            crate::error::Error::InvalidArgument(format!("pivot {r} is not in the set"))
        })?),
        None => None,
    };
    let mut out = Vec::new();
    for i in 0..fam.len() {
        if let Some(p) = pivot_index {
            if !fam.label(i, p) {
                continue;
            }
        }
        let hit = fam.hit_set(i)?;
        if hit.len() < 2 {
            continue;
        }
        let cuts = cache.cuts(metrics, g, hit.iter().map(|&x| a_set[x]).collect())?;
        out.push(
            cuts.into_iter()
                .zip(hit)
                .map(|(c, x)| {
                    let mut side = c.side;
                    side.sort_unstable();
                    LabeledCut { side, owner: a_set[x], weight: c.weight }
                })
                .collect(),
        );
    }
    Ok(out)
}

/// `RemoveLeafStep(G, A, L)`. With a pivot `r`, members with `h(r) = 0`
/// are skipped. The output is deduplicated and sorted.
pub fn remove_leaf_step(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    g: &Graph,
    a_set: &[Vertex],
    l: usize,
    pivot: Option<Vertex>,
) -> Result<Vec<LabeledCut>> {
    let batches = remove_leaf_batches(metrics, cache, g, a_set, l, pivot)?;
    let set: BTreeSet<LabeledCut> = batches.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

fn members(mask: &[bool]) -> Vec<Vertex> {
    (0..mask.len()).filter(|&v| mask[v]).collect()
}

/// Expander-decomposes with demand `1_{A'}` and removes the lowest-id half
/// of `A' ∩ X` from every cluster `X`, never removing `exempt`.
fn halve(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    a_prime: &mut [bool],
    phi: Ratio,
    exempt: Option<Vertex>,
) -> Result<()> {
    let set = members(a_prime);
    if set.is_empty() {
        return Ok(());
    }
    let d = DemandVector::indicator(g.n(), &set);
    let dec = expander_decompose(metrics, params, g, &d, phi)?;
    for cluster in &dec.clusters {
        let inside: Vec<Vertex> = cluster.iter().copied().filter(|&v| a_prime[v]).collect();
        let quota = inside.len().div_ceil(2);
        let mut candidates: Vec<Vertex> = inside.into_iter().filter(|&v| Some(v) != exempt).collect();
        candidates.sort_unstable();
        for &v in candidates.iter().take(quota) {
            a_prime[v] = false;
        }
    }
    Ok(())
}

fn check_vertex(g: &Graph, r: Vertex) -> Result<()> {
    if r >= g.n() {
        return invalid(format!("vertex {r} out of range"));
    }
    Ok(())
}

/// `CutThreshold(G, r, tau)`: the set `{v : lambda(r, v) < tau}`.
pub fn cut_threshold(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    r: Vertex,
    tau: u64,
) -> Result<Vec<Vertex>> {
    Ok(cut_threshold_run(metrics, cache, params, g, r, tau, None)?.0)
}

/// Dropped-set plus, when `keep` is given, the heaviest single isolating
/// call output among cuts avoiding `r`, lighter than `tau` and passing `keep`. Weight here is
/// the total number of vertices; ties go to the earliest call.
pub(crate) fn cut_threshold_run(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    r: Vertex,
    tau: u64,
    keep: Option<&dyn Fn(&LabeledCut) -> bool>,
) -> Result<(Vec<Vertex>, Vec<LabeledCut>)> {
    check_vertex(g, r)?;
    if tau == 0 {
        return invalid("tau must be positive");
    }
    metrics.cut_threshold_calls += 1;
    let n = g.n();
    let psi = params.cut_psi(n);
    let l = params.cut_l(n, g.total_weight());
    let phi = psi.mul_int(tau as u128)?;
    let pivot = if params.pivot { Some(r) } else { None };
    let mut a = vec![true; n];
    let mut best: (usize, Vec<LabeledCut>) = (0, Vec::new());
    for _ in 0..params.outer_iterations(n) {
        let mut a_prime = a.clone();
        let mut drop = vec![false; n];
        for _ in 0..params.inner_iterations(n) {
            let set = members(&a_prime);
            if set.len() < 2 {
                break;
            }
            for batch in remove_leaf_batches(metrics, cache, g, &set, l, pivot)? {
                let admitted: Vec<LabeledCut> = batch
                    .into_iter()
                    .filter(|c| c.weight < tau && c.side.binary_search(&r).is_err())
                    .collect();
                for c in &admitted {
                    for &v in &c.side {
                        drop[v] = true;
                    }
                }
                if let Some(keep) = keep {
                    let kept: Vec<LabeledCut> = admitted.into_iter().filter(|c| keep(c)).collect();
                    let size: usize = kept.iter().map(|c| c.side.len()).sum();
                    if size > best.0 {
                        best = (size, kept);
                    }
                }
            }
            halve(metrics, params, g, &mut a_prime, phi, Some(r))?;
        }
        let mut changed = false;
        for v in 0..n {
            if a[v] && drop[v] {
                a[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(((0..n).filter(|&v| !a[v]).collect(), best.1))
}

/// `4 x < 3 total`.
fn below_three_quarters(x: usize, total: usize) -> bool {
    4 * x < 3 * total
}

/// `DetectLargeCC(G, U, tau)`: the `tau`-connected component holding at
/// least three quarters of `U`, if there is one.
pub fn detect_large_cc(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    tau: u64,
) -> Result<Option<LargeComponent>> {
    u.validate(g)?;
    if u.is_empty() {
        return invalid("empty terminal set");
    }
    if tau == 0 {
        return invalid("tau must be positive");
    }
    metrics.detect_calls += 1;
    let n = g.n();
    let total = u.len();
    let psi = params.detect_psi(n);
    let l = params.detect_l(n);
    let fraction = params.detect_halving_fraction(n);
    let phi = psi.mul_int(tau as u128)?;
    let is_terminal = g.mask(u.members());
    let mut a = g.mask(u.members());
    let mut size = total;
    // |A| > 1/psi
    while size as u128 * psi.numer() > psi.denom() {
        let set = members(&a);
        let cuts = remove_leaf_step(metrics, cache, g, &set, l, None)?;
        let mut a_prime = vec![false; n];
        for c in &cuts {
            let in_u = c.side.iter().filter(|&&v| is_terminal[v]).count();
            if c.weight < tau && below_three_quarters(in_u, total) {
                for &v in &c.side {
                    if a[v] {
                        a_prime[v] = true;
                    }
                }
            }
        }
        let removed = a_prime.iter().filter(|&&b| b).count();
        // |A'| < fraction * |A|
        if (removed as u128) * fraction.denom() < fraction.numer() * size as u128 {
            halve(metrics, params, g, &mut a, phi, None)?;
        } else {
            for v in 0..n {
                if a_prime[v] {
                    a[v] = false;
                }
            }
        }
        let next = a.iter().filter(|&&b| b).count();
        if next >= size {
            return internal("pivot detection made no progress");
        }
        size = next;
    }
    let mut settled = vec![false; n];
    let mut unsettled = total;
    for r in members(&a) {
        if below_three_quarters(unsettled, total) {
            break;
        }
        if settled[r] {
            continue;
        }
        let low = cut_threshold(metrics, cache, params, g, r, tau)?;
        let mut high = vec![true; n];
        for v in low {
            high[v] = false;
        }
        let vertices = members(&high);
        let terminals: Vec<Vertex> = vertices.iter().copied().filter(|&v| is_terminal[v]).collect();
        if !below_three_quarters(terminals.len(), total) {
            return Ok(Some(LargeComponent { tau, terminals, vertices }));
        }
        for &v in &terminals {
            settled[v] = true;
        }
        unsettled -= terminals.len();
    }
    Ok(None)
}

/// Largest `tau` whose large component exists, with that component.
/// Searched over `[1, d]` where `d` is the `ceil(3|U|/4)`-th largest
/// terminal degree, which bounds every connectivity inside such a component.
pub fn find_tau_star(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
) -> Result<LargeComponent> {
    u.validate(g)?;
    if u.len() < 2 {
        return invalid("threshold search needs at least two terminals");
    }
    let mut degrees: Vec<u64> = u.members().iter().map(|&v| g.degree(v)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let k = (3 * u.len()).div_ceil(4);
    let mut hi = degrees[k - 1];
    let Some(mut found) = detect_large_cc(metrics, cache, params, g, u, 1)? else {
        return invalid("terminals are not connected");
    };
    let mut lo = 1;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match detect_large_cc(metrics, cache, params, g, u, mid)? {
            Some(c) => {
                lo = mid;
                found = c;
            }
            None => hi = mid - 1,
        }
    }
    Ok(found)
}

/// `Decomp(G, C, r, tau)` with the terminal set `U` passed explicitly.
/// Returns the maximal collected sets, sorted by owner.
#[allow(clippy::too_many_arguments)]
pub fn decomp(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    c: &[Vertex],
    r: Vertex,
    tau: u64,
) -> Result<Vec<LabeledCut>> {
    check_vertex(g, r)?;
    if !c.contains(&r) {
        return invalid("pivot must lie in the component");
    }
    if tau == 0 {
        return invalid("tau must be positive");
    }
    let n = g.n();
    let psi = params.cut_psi(n);
    let l = params.cut_l(n, g.total_weight());
    let phi = psi.mul_int(tau as u128)?;
    let pivot = if params.pivot { Some(r) } else { None };
    let is_terminal = g.mask(u.members());
    let total = u.len();
    let mut a = g.mask(c);
    let mut collected: BTreeSet<LabeledCut> = BTreeSet::new();
    for _ in 0..params.outer_iterations(n) {
        let mut a_prime = a.clone();
        for _ in 0..params.inner_iterations(n) {
            let set = members(&a_prime);
            if set.len() < 2 {
                break;
            }
            for cut in remove_leaf_step(metrics, cache, g, &set, l, pivot)? {
                let in_u = cut.side.iter().filter(|&&v| is_terminal[v]).count();
                if cut.weight == tau && cut.side.binary_search(&r).is_err() && 16 * in_u <= 15 * total {
                    collected.insert(cut);
                }
            }
            halve(metrics, params, g, &mut a_prime, phi, Some(r))?;
        }
        let mut changed = false;
        for cut in &collected {
            for &v in &cut.side {
                if a[v] {
                    a[v] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    maximal_sets(n, collected.into_iter().collect())
}

/// Keeps sets not contained in a kept set, scanning by size descending and
/// owner ascending; the kept sets must be pairwise disjoint.
fn maximal_sets(n: usize, mut cuts: Vec<LabeledCut>) -> Result<Vec<LabeledCut>> {
    cuts.sort_by(|x, y| y.side.len().cmp(&x.side.len()).then(x.owner.cmp(&y.owner)));
    let mut holder = vec![usize::MAX; n];
    let mut kept: Vec<LabeledCut> = Vec::new();
    for cut in cuts {
        let first = holder[cut.side[0]];
        if first != usize::MAX && cut.side.iter().all(|&v| holder[v] == first) {
            continue;
        }
        if cut.side.iter().any(|&v| holder[v] != usize::MAX) {
            return internal(format!("maximal cuts of {} and {} cross", kept[holder[cut.side.iter().copied().find(|&v| holder[v] != usize::MAX).unwrap_or(0)]].owner, cut.owner));
        }
        for &v in &cut.side {
            holder[v] = kept.len();
        }
        kept.push(cut);
    }
    kept.sort_by_key(|c| c.owner);
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> Graph {
        Graph::new(5, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)]).unwrap()
    }

    fn k4() -> Graph {
        Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap()
    }

    fn bridged() -> Graph {
        Graph::new(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)]).unwrap()
    }

    #[test]
    fn leaf_step_examples() {
        let mut m = Metrics::new();
        let out = remove_leaf_step(&mut m, &mut CutCache::default(), &star(), &[1, 2, 3, 4], 2, None).unwrap();
        for leaf in 1..5 {
            assert!(out.contains(&LabeledCut { side: vec![leaf], owner: leaf, weight: 1 }));
        }
        let e = Graph::new(2, [(0, 1, 3)]).unwrap();
        let out = remove_leaf_step(&mut m, &mut CutCache::default(), &e, &[0, 1], 1, None).unwrap();
        assert!(out.contains(&LabeledCut { side: vec![0], owner: 0, weight: 3 }));
        assert!(out.contains(&LabeledCut { side: vec![1], owner: 1, weight: 3 }));
        let out = remove_leaf_step(&mut m, &mut CutCache::default(), &k4(), &[0, 1, 2, 3], 1, None).unwrap();
        for x in 0..4 {
            assert!(out.contains(&LabeledCut { side: vec![x], owner: x, weight: 3 }));
        }
        assert!(remove_leaf_step(&mut m, &mut CutCache::default(), &k4(), &[2], 3, None).unwrap().is_empty());
    }

    #[test]
    fn threshold_examples() {
        for params in [Params::desk(), Params::full()] {
            let mut m = Metrics::new();
            assert_eq!(cut_threshold(&mut m, &mut CutCache::new(&params), &params, &bridged(), 0, 2).unwrap(), vec![3, 4, 5]);
            assert!(cut_threshold(&mut m, &mut CutCache::new(&params), &params, &bridged(), 4, 1).unwrap().is_empty());
            assert_eq!(cut_threshold(&mut m, &mut CutCache::new(&params), &params, &k4(), 0, 4).unwrap(), vec![1, 2, 3]);
            assert!(cut_threshold(&mut m, &mut CutCache::new(&params), &params, &k4(), 0, 0).is_err());
        }
    }

    #[test]
    fn detect_examples() {
        let params = Params::desk();
        let mut m = Metrics::new();
        let mut edges = vec![(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)];
        edges.push((3, 4, 1));
        let g = Graph::new(5, edges).unwrap();
        let c = detect_large_cc(&mut m, &mut CutCache::new(&params), &params, &g, &TerminalSet::all(5), 3).unwrap().unwrap();
        assert_eq!(c.terminals, vec![0, 1, 2, 3]);
        let p = Graph::new(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        assert!(detect_large_cc(&mut m, &mut CutCache::new(&params), &params, &p, &TerminalSet::all(4), 2).unwrap().is_none());
        let c = detect_large_cc(&mut m, &mut CutCache::new(&params), &params, &p, &TerminalSet::all(4), 1).unwrap().unwrap();
        assert_eq!(c.terminals, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tau_star_examples() {
        let params = Params::desk();
        let mut m = Metrics::new();
        let c = find_tau_star(&mut m, &mut CutCache::new(&params), &params, &k4(), &TerminalSet::all(4)).unwrap();
        assert_eq!((c.tau, c.vertices), (3, vec![0, 1, 2, 3]));
        let c = find_tau_star(&mut m, &mut CutCache::new(&params), &params, &bridged(), &TerminalSet::all(6)).unwrap();
        assert_eq!((c.tau, c.terminals.len()), (1, 6));
        let c = find_tau_star(&mut m, &mut CutCache::new(&params), &params, &star(), &TerminalSet::all(5)).unwrap();
        assert_eq!((c.tau, c.terminals.len()), (1, 5));
        assert!(find_tau_star(&mut m, &mut CutCache::new(&params), &params, &star(), &TerminalSet::new(vec![0])).is_err());
    }

    #[test]
    fn decomp_examples() {
        let params = Params::desk();
        let mut m = Metrics::new();
        let out = decomp(&mut m, &mut CutCache::new(&params), &params, &star(), &TerminalSet::all(5), &[0, 1, 2, 3, 4], 0, 1).unwrap();
        let sides: Vec<Vec<Vertex>> = out.iter().map(|c| c.side.clone()).collect();
        assert_eq!(sides, vec![vec![1], vec![2], vec![3], vec![4]]);
        let p = Graph::new(2, [(0, 1, 4)]).unwrap();
        let out = decomp(&mut m, &mut CutCache::new(&params), &params, &p, &TerminalSet::all(2), &[0, 1], 1, 4).unwrap();
        assert_eq!(out, vec![LabeledCut { side: vec![0], owner: 0, weight: 4 }]);
        // vertex 2 carries the bridge, so its minimal cut of value 2 is {2, 3, 4, 5}
        let out = decomp(&mut m, &mut CutCache::new(&params), &params, &bridged(), &TerminalSet::all(6), &[0, 1, 2], 0, 2).unwrap();
        let expected: Vec<Vec<Vertex>> =
            [1, 2].iter().map(|&v| crate::oracles::brute_force_group_cut(&bridged(), &[v], &[0]).unwrap().1).collect();
        let sides: Vec<Vec<Vertex>> = out.iter().map(|c| c.side.clone()).collect();
        assert_eq!(sides, expected);
        assert_eq!(sides, vec![vec![1], vec![2, 3, 4, 5]]);
        assert!(decomp(&mut m, &mut CutCache::new(&params), &params, &star(), &TerminalSet::all(5), &[1, 2], 0, 1).is_err());
    }
}
