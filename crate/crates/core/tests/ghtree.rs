mod common;

use ghcut_core::approx::{approx_gh_forest, approx_gh_tree, lambda_u, level_cuts, ApproxConfig};
use ghcut_core::gen;
use ghcut_core::ghtree::{gh_forest, gh_tree, log_16_15};
use ghcut_core::graph::{connectivity_oracle, Graph, TerminalSet};
use ghcut_core::metrics::Metrics;
use ghcut_core::oracles::pairwise_lambda;
use ghcut_core::params::Params;
use ghcut_core::ratio::Ratio;
use ghcut_core::tree::{verify_gh_tree, SteinerGHTree};
use proptest::prelude::*;

fn verified(g: &Graph, u: &TerminalSet, t: &SteinerGHTree, eps: Ratio) -> bool {
    let mut m = Metrics::new();
    let mut lam = |s, t| connectivity_oracle(&mut m, g, s, t);
    verify_gh_tree(g, u, t, eps, &mut lam, None).unwrap().passed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_tree_is_correct(g in common::connected(2, 12, 1), seed in any::<u64>()) {
        let u = common::terminals(g.n(), seed);
        let p = Params::default();
        let mut m = Metrics::new();
        let t = gh_tree(&mut m, &p, &g, &u).unwrap();
        prop_assert!(verified(&g, &u, &t, Ratio::zero()));
        prop_assert!(m.recursion_depth as usize <= log_16_15(u.len()) + 2);
        let again = gh_tree(&mut Metrics::new(), &p, &g, &u).unwrap();
        prop_assert_eq!(t, again);
    }

    #[test]
    fn exact_tree_on_weighted_graphs(g in common::connected(2, 10, 6)) {
        let u = TerminalSet::all(g.n());
        let t = gh_tree(&mut Metrics::new(), &Params::default(), &g, &u).unwrap();
        prop_assert!(verified(&g, &u, &t, Ratio::zero()));
    }

    #[test]
    fn approximate_tree_is_within_bounds(g in common::connected(2, 14, 50), seed in any::<u64>(), den in 1u128..=10) {
        let u = common::terminals(g.n(), seed);
        let eps = Ratio::new(1, den).unwrap();
        let t = approx_gh_tree(&mut Metrics::new(), &Params::default(), &g, &u, eps).unwrap();
        prop_assert!(verified(&g, &u, &t, eps));
    }

    #[test]
    fn level_cuts_are_tight(g in common::connected(3, 12, 30), seed in any::<u64>()) {
        let u = common::terminals(g.n(), seed);
        prop_assume!(u.len() >= 2);
        let p = Params::default();
        let mut m = Metrics::new();
        let eps = ApproxConfig::new(Ratio::new(1, 2).unwrap(), u.len()).unwrap().epsilon_prime;
        let lam = lambda_u(&mut m, &p, &g, &u).unwrap();
        let (cuts, exact) = level_cuts(&mut m, &p, &g, &u, eps).unwrap();
        prop_assert!(!cuts.is_empty());
        let mut seen = vec![false; g.n()];
        for (side, w) in &cuts {
            prop_assert_eq!(g.cut_weight(side).unwrap(), *w);
            prop_assert!(side.iter().any(|&v| u.contains(v)));
            prop_assert!(*w >= lam);
            if !exact {
                prop_assert!((*w as u128) * eps.denom() <= (lam as u128) * (eps.denom() + eps.numer()));
            }
            for &v in side {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        let outside: Vec<usize> = u.members().iter().copied().filter(|&v| !seen[v]).collect();
        prop_assert!(!outside.is_empty());
    }
}

#[test]
fn forests_cover_every_component() {
    let g = Graph::new(7, [(0, 1, 2), (1, 2, 1), (3, 4, 5), (4, 5, 5), (3, 5, 1)]).unwrap();
    let u = TerminalSet::all(7);
    let p = Params::default();
    let f = gh_forest(&mut Metrics::new(), &p, &g, &u).unwrap();
    assert_eq!(f.len(), 3);
    for c in &f {
        let t = c.tree.as_ref().unwrap();
        assert_eq!(t.nodes(), &c.vertices[..]);
    }
    let a = approx_gh_forest(&mut Metrics::new(), &p, &g, &u, Ratio::new(1, 4).unwrap()).unwrap();
    assert_eq!(a.len(), 3);
    assert!(gh_tree(&mut Metrics::new(), &p, &g, &u).is_err());
}

#[test]
fn medium_graphs_are_exact() {
    let p = Params::default();
    for seed in 0..3 {
        let g = gen::random_connected(40, 120, 1, seed);
        let u = TerminalSet::all(40);
        let t = gh_tree(&mut Metrics::new(), &p, &g, &u).unwrap();
        let lam = pairwise_lambda(&mut Metrics::new(), &g, &u).unwrap();
        for s in 0..40 {
            for x in s + 1..40 {
                assert_eq!(t.path_min(s, x).unwrap(), lam[s][x]);
            }
        }
    }
}
