mod common;

use ghcut_core::graph::{connectivity_oracle, TerminalSet};
use ghcut_core::maxflow::max_flow;
use ghcut_core::metrics::Metrics;
use ghcut_core::oracles::{brute_force_group_cut, brute_force_mincut, census_from_matrix, classic_gomory_hu, pairwise_lambda};
use ghcut_core::ratio::Ratio;
use ghcut_core::tree::verify_gh_tree;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn maxflow_matches_enumeration(g in common::any_graph(9, 6), s in 0usize..9, t in 0usize..9) {
        let (s, t) = (s % g.n(), t % g.n());
        prop_assume!(s != t);
        let mut m = Metrics::new();
        let (value, side) = brute_force_mincut(&mut m, &g, s, t).unwrap();
        let flow = max_flow(&mut m, &g, &[s], &[t]).unwrap();
        prop_assert_eq!(flow.value, value);
        prop_assert_eq!(flow.min_source_side, side);
    }

    #[test]
    fn group_cuts_match_enumeration(g in common::any_graph(9, 4), mask in any::<u16>()) {
        // bit pairs: 01 source, 10 sink
        let rel: Vec<u16> = (0..g.n()).map(|v| (mask >> (v % 8 * 2)) & 3).collect();
        let src: Vec<usize> = (0..g.n()).filter(|&v| rel[v] == 1).collect();
        let snk: Vec<usize> = (0..g.n()).filter(|&v| rel[v] == 2).collect();
        prop_assume!(!src.is_empty() && !snk.is_empty());
        let mut m = Metrics::new();
        let (value, side) = brute_force_group_cut(&g, &src, &snk).unwrap();
        let flow = max_flow(&mut m, &g, &src, &snk).unwrap();
        prop_assert_eq!(flow.value, value);
        prop_assert_eq!(flow.min_source_side, side);
    }

    #[test]
    fn classic_tree_is_exact(g in common::connected(2, 12, 5), seed in any::<u64>()) {
        let u = common::terminals(g.n(), seed);
        let mut m = Metrics::new();
        let t = classic_gomory_hu(&mut m, &g, &u).unwrap();
        let mut scratch = Metrics::new();
        let mut lam = |s, t| brute_force_mincut(&mut scratch, &g, s, t).map(|r| r.0);
        let rep = verify_gh_tree(&g, &u, &t, Ratio::zero(), &mut lam, None).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn threshold_relation_is_transitive(g in common::connected(2, 10, 4), tau in 1u64..8) {
        let u = TerminalSet::all(g.n());
        let lam = pairwise_lambda(&mut Metrics::new(), &g, &u).unwrap();
        let census = census_from_matrix(&u, &lam, tau).unwrap();
        let total: usize = census.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, g.n());
    }
}

#[test]
fn oracle_calls_are_counted() {
    let mut m = Metrics::new();
    let g = common::bridged();
    brute_force_mincut(&mut m, &g, 0, 5).unwrap();
    classic_gomory_hu(&mut m, &g, &TerminalSet::all(6)).unwrap();
    assert_eq!(m.oracle_calls, 2);
    assert_eq!(m.maxflow_calls, 0);
    assert_eq!(connectivity_oracle(&mut m, &common::k4(), 0, 3).unwrap(), 3);
}
