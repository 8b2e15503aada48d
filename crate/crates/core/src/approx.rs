//! The `(1 + eps)`-approximate Steiner Gomory-Hu tree for weighted graphs.

use num_bigint::BigUint;

use crate::error::{internal, invalid, Result};
use crate::ghtree::{depth_cap, log_16_15, per_component, recurse_type_i, terminal_set, ComponentTree, Ctx, Terminals};
use crate::graph::{Graph, TerminalSet, Vertex};
use crate::metrics::Metrics;
use crate::params::Params;
use crate::ratio::Ratio;
use crate::steps::{cut_threshold, cut_threshold_run, decomp, find_tau_star, CutCache, LabeledCut};
use crate::tree::SteinerGHTree;

/// `eps` and the per-level `eps' = eps / (2 ceil(log_{16/15} |U|))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxConfig {
    pub epsilon: Ratio,
    pub epsilon_prime: Ratio,
}

impl ApproxConfig {
    pub fn new(epsilon: Ratio, terminals: usize) -> Result<ApproxConfig> {
        if epsilon.is_zero() || epsilon > Ratio::one() {
            return invalid(format!("epsilon must lie in (0, 1], got {epsilon}"));
        }
        let levels = log_16_15(terminals).max(1) as u128;
        let den = epsilon
            .denom()
            .checked_mul(2 * levels)
            .ok_or_else(|| crate::error::Error::Overflow("epsilon denominator".into()))?;
        Ok(ApproxConfig { epsilon, epsilon_prime: Ratio::new(epsilon.numer(), den)? })
    }

    /// `(ceil(log_{16/15} |U|) + 2) (1 + ceil(1 / eps'))`.
    pub fn depth_cap(&self, terminals: usize) -> usize {
        let inv = self.epsilon_prime.denom().div_ceil(self.epsilon_prime.numer());
        depth_cap(terminals).saturating_mul(1 + inv as usize)
    }
}

/// `floor((1 + eps)^k)` for the least `k` with `(1 + eps)^k >= lambda`.
pub fn rounded_power(eps: Ratio, lambda: u64) -> u64 {
    let (p, q) = (BigUint::from(eps.numer()), BigUint::from(eps.denom()));
    let base = &p + &q;
    let lam = BigUint::from(lambda);
    let reaches = |k: u32| base.pow(k) >= &lam * q.pow(k);
    let estimate = (lambda.max(1) as f64).ln() / eps.to_f64().ln_1p();
    let mut k = (estimate.floor() as i64 - 2).max(0) as u32;
    while !reaches(k) {
        k += 1;
    }
    while k > 0 && reaches(k - 1) {
        k -= 1;
    }
    let v = base.pow(k) / q.pow(k);
    u64::try_from(v).expect("rounded power stays below twice lambda")
}

/// Largest `tau <= hi` with no terminal cut off from `r` below `tau`.
fn lambda_search(
    metrics: &mut Metrics,
    cache: &mut CutCache,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    r: Vertex,
    hi: u64,
) -> Result<u64> {
    let (mut lo, mut hi) = (1, hi.max(1));
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let dropped = cut_threshold(metrics, cache, params, g, r, mid)?;
        if dropped.iter().any(|&v| u.contains(v)) {
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

/// `lambda(U)`, the least pairwise connectivity among the terminals.
pub fn lambda_u(metrics: &mut Metrics, params: &Params, g: &Graph, u: &TerminalSet) -> Result<u64> {
    u.validate(g)?;
    if u.len() < 2 {
        return invalid("lambda(U) needs at least two terminals");
    }
    if !g.is_connected() {
        return invalid("graph is disconnected");
    }
    let hi = u.members().iter().map(|&v| g.degree(v)).min().unwrap_or(1);
    let mut cache = CutCache::new(params);
    lambda_search(metrics, &mut cache, params, g, u, u.members()[0], hi)
}

/// Sides with their cut weights.
pub type SideList = Vec<(Vec<Vertex>, u64)>;

/// The cut collection of one level with per-level parameter `eps` and
/// whether it came from `Decomp`. Sides are sorted and pairwise disjoint.
pub fn level_cuts(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    eps: Ratio,
) -> Result<(SideList, bool)> {
    let k = u.len();
    let mut cache = CutCache::new(params);
    let star = find_tau_star(metrics, &mut cache, params, g, u)?;
    let r = star.terminals[0];
    if 16 * star.terminals.len() >= 15 * k {
        let cuts = decomp(metrics, &mut cache, params, g, u, &star.terminals, r, star.tau)?;
        return Ok((cuts.into_iter().map(|c| (c.side, c.weight)).collect(), true));
    }
    let lam = lambda_search(metrics, &mut cache, params, g, u, r, star.tau)?;
    // below tau* no piece reaches into C*, below the rounded power every
    // piece is within 1 + eps of lambda(U)
    let tau = star.tau.min(rounded_power(eps, lam) + 1);
    let keep = |c: &LabeledCut| c.side.iter().any(|&v| u.contains(v));
    let (_, batch) = cut_threshold_run(metrics, &mut cache, params, g, r, tau, Some(&keep))?;
    if batch.is_empty() {
        return internal(format!("no terminal is cut off below {tau}"));
    }
    Ok((batch.into_iter().map(|c| (c.side, c.weight)).collect(), false))
}

fn approx_rec(ctx: &mut Ctx, eps: Ratio, g: &Graph, terms: &Terminals, depth: usize) -> Result<SteinerGHTree> {
    ctx.metrics.enter_recursion(depth);
    if depth > ctx.depth_cap {
        return internal(format!("recursion depth {depth} exceeds cap {}", ctx.depth_cap));
    }
    if terms.len() == 1 {
        return Ok(SteinerGHTree::singleton(terms[0].1, g.n()));
    }
    if !g.is_connected() {
        return internal("recursive instance is disconnected");
    }
    let (sides, exact) = level_cuts(ctx.metrics, ctx.params, g, &terminal_set(terms), eps)?;
    let large_limit = if exact { (7, 8) } else { (1, 1) };
    recurse_type_i(ctx, g, terms, &sides, depth, large_limit, &mut |c, g, t, d| approx_rec(c, eps, g, t, d))
}

/// `(1 + eps)`-approximate Steiner Gomory-Hu tree of connected `g`.
pub fn approx_gh_tree(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    eps: Ratio,
) -> Result<SteinerGHTree> {
    u.validate(g)?;
    if u.is_empty() {
        return invalid("empty terminal set");
    }
    let config = ApproxConfig::new(eps, u.len())?;
    if !g.is_connected() {
        return invalid("graph is disconnected; use approx_gh_forest");
    }
    let mut ctx = Ctx { metrics, params, next_label: g.n(), depth_cap: config.depth_cap(u.len()) };
    let terms: Terminals = u.members().iter().map(|&v| (v, v)).collect();
    approx_rec(&mut ctx, config.epsilon_prime, g, &terms, 0)
}

/// [`approx_gh_tree`] on every component.
pub fn approx_gh_forest(
    metrics: &mut Metrics,
    params: &Params,
    g: &Graph,
    u: &TerminalSet,
    eps: Ratio,
) -> Result<Vec<ComponentTree>> {
    ApproxConfig::new(eps, u.len())?;
    per_component(g, u, &mut |sg, su| approx_gh_tree(metrics, params, sg, su, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connectivity_oracle;
    use crate::tree::verify_gh_tree;

    fn bridged() -> Graph {
        Graph::new(6, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1), (2, 3, 1)]).unwrap()
    }

    fn check(g: &Graph, u: &TerminalSet, eps: Ratio) -> SteinerGHTree {
        let mut m = Metrics::new();
        let t = approx_gh_tree(&mut m, &Params::default(), g, u, eps).unwrap();
        let mut scratch = Metrics::new();
        let mut lam = |s, t| connectivity_oracle(&mut scratch, g, s, t);
        let rep = verify_gh_tree(g, u, &t, eps, &mut lam, None).unwrap();
        assert!(rep.passed(), "{rep:?}");
        t
    }

    #[test]
    fn lambda_examples() {
        let mut m = Metrics::new();
        let p = Params::default();
        assert_eq!(lambda_u(&mut m, &p, &bridged(), &TerminalSet::all(6)).unwrap(), 1);
        let k4 = Graph::new(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)]).unwrap();
        assert_eq!(lambda_u(&mut m, &p, &k4, &TerminalSet::all(4)).unwrap(), 3);
        let e = Graph::new(2, [(0, 1, 9)]).unwrap();
        assert_eq!(lambda_u(&mut m, &p, &e, &TerminalSet::all(2)).unwrap(), 9);
        assert!(lambda_u(&mut m, &p, &e, &TerminalSet::new(vec![0])).is_err());
    }

    #[test]
    fn powers() {
        let half = Ratio::new(1, 2).unwrap();
        // 1.5^k: 1, 1.5, 2.25, 3.375, 5.06
        assert_eq!(rounded_power(half, 1), 1);
        assert_eq!(rounded_power(half, 2), 2);
        assert_eq!(rounded_power(half, 3), 3);
        assert_eq!(rounded_power(half, 4), 5);
        assert_eq!(rounded_power(half, 5), 5);
        let tiny = Ratio::new(1, 1000).unwrap();
        let v = rounded_power(tiny, 100_000);
        assert!((100_000..100_100).contains(&v));
    }

    #[test]
    fn config() {
        let c = ApproxConfig::new(Ratio::new(1, 2).unwrap(), 16).unwrap();
        assert_eq!(c.epsilon_prime, Ratio::new(1, 172).unwrap());
        assert_eq!(c.depth_cap(16), 45 * 173);
        assert!(ApproxConfig::new(Ratio::zero(), 4).is_err());
        assert!(ApproxConfig::new(Ratio::new(3, 2).unwrap(), 4).is_err());
    }

    #[test]
    fn tree_examples() {
        let half = Ratio::new(1, 2).unwrap();
        let p = Graph::new(3, [(0, 1, 3), (1, 2, 7)]).unwrap();
        let t = check(&p, &TerminalSet::all(3), half);
        assert_eq!(t.path_min(0, 1).unwrap(), 3);
        let e = Graph::new(2, [(0, 1, 4)]).unwrap();
        assert_eq!(check(&e, &TerminalSet::all(2), Ratio::one()).edges()[0].w, 4);
        // the heavy core holds four of five terminals
        let star = Graph::new(5, [(0, 1, 5), (0, 2, 5), (0, 3, 5), (0, 4, 1)]).unwrap();
        let t = check(&star, &TerminalSet::all(5), Ratio::new(1, 10).unwrap());
        assert_eq!(t.path_min(4, 0).unwrap(), 1);
        check(&bridged(), &TerminalSet::all(6), half);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let mut m = Metrics::new();
        let e = Graph::new(2, [(0, 1, 4)]).unwrap();
        assert!(approx_gh_tree(&mut m, &Params::default(), &e, &TerminalSet::all(2), Ratio::zero()).is_err());
    }
}
