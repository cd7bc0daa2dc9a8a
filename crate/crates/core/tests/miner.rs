mod common;

use common::*;
use evomine::oracle::{oracle_is_subgraph, oracle_mine, OracleLimits};
use evomine::{evaluate_patterns, frequency, mine_frequent, Frequency, MiningConfig, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn cfg(alpha: Rational, max_edges: usize) -> MiningConfig {
    MiningConfig::new(alpha, max_edges).unwrap()
}

fn random_window(r: &mut TestRng, snaps: usize) -> evomine::TimeWindow {
    window(
        0,
        (0..snaps as u64)
            .map(|t| random_snapshot(r, t, 8, 12, 2, 2))
            .collect(),
    )
}

#[test]
fn triangle_in_three_of_five() {
    let tri_snap = |t| {
        snapshot(
            t,
            &[(0, "A"), (1, "A"), (2, "A"), (3, "B")],
            &[(0, 1, "x"), (1, 2, "x"), (2, 0, "x"), (2, 3, "y")],
        )
    };
    let path_snap = |t| {
        snapshot(
            t,
            &[(0, "A"), (1, "A"), (2, "A"), (3, "B")],
            &[(0, 1, "x"), (1, 2, "x"), (2, 3, "y")],
        )
    };
    let snaps = vec![
        path_snap(0),
        tri_snap(1),
        path_snap(2),
        tri_snap(3),
        tri_snap(4),
    ];
    let tri = pattern(&["A", "A", "A"], &[(0, 1, "x"), (1, 2, "x"), (2, 0, "x")]);
    let brute = snaps.iter().filter(|g| oracle_is_subgraph(&tri, g)).count();
    assert_eq!(brute, 3);
    let w = window(0, snaps);
    assert_eq!(frequency(&tri, &w).ratio(), Rational::new(3, 5));
}

#[test]
fn seeded_window_matches_oracle() {
    let mut r = rng(20240601);
    let w = random_window(&mut r, 10);
    let mined = mine_frequent(&w, &cfg(Rational::new(3, 10), 3)).unwrap();
    let oracle = oracle_mine(&w, Rational::new(3, 10), 3, &OracleLimits::default()).unwrap();
    assert!(!mined.is_empty());
    assert_eq!(mined, oracle);
}

#[test]
fn union_evaluation_spot_check() {
    let mut r = rng(77);
    let w1 = random_window(&mut r, 6);
    let w2 = window(
        1,
        (10..16)
            .map(|t| random_snapshot(&mut r, t, 8, 12, 2, 2))
            .collect(),
    );
    let c = cfg(Rational::new(1, 2), 2);
    let f1 = mine_frequent(&w1, &c).unwrap();
    let f2 = mine_frequent(&w2, &c).unwrap();
    let mut union: Vec<_> = f1.patterns().chain(f2.patterns()).cloned().collect();
    union.sort();
    union.dedup();
    for w in [&w1, &w2] {
        let t = evaluate_patterns(&union, w);
        assert_eq!(t.len(), union.len());
        for p in &union {
            let brute = w
                .snapshots()
                .iter()
                .filter(|g| oracle_is_subgraph(p, g))
                .count();
            assert_eq!(
                t.frequency(p.code()),
                Some(Frequency::new(brute as u32, w.len() as u32))
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mined_equals_oracle(seed in any::<u64>(), alpha_pick in 0..3usize) {
        let mut r = rng(seed);
        let snaps = r.gen_range(1..=10);
        let w = random_window(&mut r, snaps);
        let alpha = [Rational::new(1, 5), Rational::new(1, 2), Rational::from_integer(0)][alpha_pick];
        let mined = mine_frequent(&w, &cfg(alpha, 3)).unwrap();
        let oracle = oracle_mine(&w, alpha, 3, &OracleLimits::default()).unwrap();
        prop_assert_eq!(mined, oracle);
    }

    #[test]
    fn anti_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_window(&mut r, 6);
        let t = mine_frequent(&w, &cfg(Rational::new(1, 5), 3)).unwrap();
        for e in t.entries.values() {
            for sub in e.pattern.one_edge_subpatterns() {
                let f = t.frequency(sub.code());
                prop_assert!(f.is_some(), "sub-pattern {} missing", sub);
                prop_assert!(f.unwrap() >= e.frequency);
            }
        }
    }

    #[test]
    fn input_order_irrelevant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_window(&mut r, 6);
        let mut snaps = w.snapshots().to_vec();
        snaps.shuffle(&mut r);
        // time indices must increase; rebuild with fresh indices in shuffled order
        let snaps: Vec<_> = snaps
            .iter()
            .enumerate()
            .map(|(i, g)| {
                evomine::Snapshot::new(
                    i as u64,
                    g.nodes().map(|(id, lab)| (id, lab.clone())).collect(),
                    g.edges().map(|(a, b, lab)| (a, b, lab.clone())).collect(),
                )
                .unwrap()
            })
            .collect();
        let w2 = window(0, snaps);
        let c = cfg(Rational::new(1, 3), 3);
        prop_assert_eq!(mine_frequent(&w, &c).unwrap(), mine_frequent(&w2, &c).unwrap());
    }

    #[test]
    fn raising_alpha_shrinks(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_window(&mut r, 8);
        let lo = mine_frequent(&w, &cfg(Rational::new(1, 4), 3)).unwrap();
        let hi = mine_frequent(&w, &cfg(Rational::new(1, 2), 3)).unwrap();
        for code in hi.codes() {
            prop_assert!(lo.get(code).is_some());
        }
    }

    #[test]
    fn evaluate_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_window(&mut r, 5);
        let t = mine_frequent(&w, &cfg(Rational::new(1, 5), 3)).unwrap();
        let again = evaluate_patterns(t.patterns(), &w);
        prop_assert_eq!(t, again);
    }

    #[test]
    fn frequency_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = random_window(&mut r, 7);
        let p = random_pattern(&mut r, 3, 2, 2);
        let f = frequency(&p, &w);
        prop_assert_eq!(f.window_size as usize, w.len());
        prop_assert!(f.support <= f.window_size);
    }
}
