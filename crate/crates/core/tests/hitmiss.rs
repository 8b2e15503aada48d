use ghcut_core::hitmiss::{find_violation, HitMissFamily};
use proptest::prelude::*;

#[test]
fn exhaustive_small_grounds() {
    for n in 1..=32 {
        for a in 1..=4 {
            for b in 1..=2.min(a) {
                let fam = HitMissFamily::construct(n, a, b).unwrap();
                assert_eq!(find_violation(&fam, a, b), None, "N={n} a={a} b={b} {}", fam.scheme_name());
            }
        }
    }
}

#[test]
fn size_grows_logarithmically() {
    let mut ratios = Vec::new();
    for k in 4..=16 {
        let n = 1usize << k;
        let fam = HitMissFamily::construct(n, 2, 2).unwrap();
        ratios.push(fam.len() as f64 / k as f64);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(max < 64.0, "{ratios:?}");
}

#[test]
fn parameters_are_checked() {
    assert!(HitMissFamily::construct(8, 1, 2).is_err());
    assert!(HitMissFamily::construct(8, 0, 0).is_err());
    assert!(HitMissFamily::construct(8, 3, 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hit_sets_agree_with_labels(n in 2usize..200, a in 2usize..5, idx in any::<usize>()) {
        let fam = HitMissFamily::construct(n, a, 2).unwrap();
        let i = idx % fam.len();
        let hit = fam.hit_set(i).unwrap();
        let expect: Vec<usize> = (0..n).filter(|&x| fam.label(i, x)).collect();
        prop_assert_eq!(hit, expect);
    }

    #[test]
    fn random_pairs_are_served(n in 5usize..5000, a in 2usize..5, seed in any::<u64>()) {
        use rand::{seq::index::sample, SeedableRng};
        let fam = HitMissFamily::construct(n, a, 2).unwrap();
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pick = sample(&mut r, n, a + 2).into_vec();
        let (bset, aset) = pick.split_at(2);
        let served = (0..fam.len()).any(|i| bset.iter().all(|&y| fam.label(i, y)) && aset.iter().all(|&x| !fam.label(i, x)));
        prop_assert!(served);
    }
}

/// Some admissible `(A, B)` is served by no member, by plain enumeration.
fn violated_by_enumeration(n: usize, rows: &[u32], a: usize, b: usize) -> bool {
    (1u32..1 << n).filter(|bm| bm.count_ones() as usize <= b).any(|bm| {
        (0u32..1 << n)
            .filter(|am| am & bm == 0 && am.count_ones() as usize <= a)
            .any(|am| !rows.iter().any(|&h| h & bm == bm && h & am == 0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn violation_search_matches_enumeration(n in 1usize..8, rows in proptest::collection::vec(any::<u32>(), 0..12), a in 1usize..4, b in 1usize..3) {
        prop_assume!(b <= a);
        let rows: Vec<u32> = rows.into_iter().map(|h| h & ((1 << n) - 1)).collect();
        let labelings = rows.iter().map(|&h| (0..n).map(|x| h >> x & 1 == 1).collect()).collect();
        let fam = HitMissFamily::from_labelings(n, labelings).unwrap();
        let found = find_violation(&fam, a, b);
        prop_assert_eq!(found.is_some(), violated_by_enumeration(n, &rows, a, b));
        if let Some((aset, bset)) = found {
            prop_assert!(aset.len() <= a && bset.len() <= b);
            prop_assert!(!(0..fam.len()).any(|i| bset.iter().all(|&y| fam.label(i, y)) && aset.iter().all(|&x| !fam.label(i, x))));
        }
    }
}
