mod common;

use common::*;
use evomine::windowing::{js_divergence, partition, snapshot_distribution};
use evomine::{adaptive_partition, fixed_partition, Label, PartitionConfig, Snapshot};
use proptest::prelude::*;
use rand::Rng;

fn concat_ids(ws: &[evomine::TimeWindow]) -> Vec<u64> {
    ws.iter()
        .flat_map(|w| w.snapshots().iter().map(|g| g.time_index()))
        .collect()
}

fn random_stream(r: &mut TestRng, len: usize) -> Vec<Snapshot> {
    (0..len as u64)
        .map(|t| {
            let labels = r.gen_range(1..=3);
            random_snapshot(r, t, 6, 8, labels, labels)
        })
        .collect()
}

fn relabel(g: &Snapshot) -> Snapshot {
    let map = |lab: &Label| l(&format!("{}_renamed", lab.as_str().to_lowercase()));
    Snapshot::new(
        g.time_index(),
        g.nodes().map(|(i, lab)| (i, map(lab))).collect(),
        g.edges().map(|(a, b, lab)| (a, b, map(lab))).collect(),
    )
    .unwrap()
}

#[test]
fn label_shift_cut_found() {
    let stream = label_shift_stream(1);
    // direct evaluation: divergence across the shift dwarfs divergence within a regime
    let before = snapshot_distribution(&stream[10]);
    let before2 = snapshot_distribution(&stream[20]);
    let after = snapshot_distribution(&stream[60]);
    assert!(js_divergence(&before, &after) > 0.1);
    assert!(js_divergence(&before, &before2) < 0.1);

    let ws = adaptive_partition(&stream, &PartitionConfig::adaptive(0.1, 5, 100)).unwrap();
    assert_eq!(ws.len(), 2);
    assert!((48..=52).contains(&ws[1].start_index()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partitions_are_complete(seed in any::<u64>(), len in 1..40usize, size in 1..12usize, tau in 0.01f64..1.0, min in 1..6usize, extra in 0..10usize) {
        let mut r = rng(seed);
        let stream = random_stream(&mut r, len);
        let expected: Vec<u64> = stream.iter().map(|g| g.time_index()).collect();
        let fixed = fixed_partition(&stream, &PartitionConfig::fixed(size)).unwrap();
        prop_assert_eq!(concat_ids(&fixed), expected.clone());
        let cfg = PartitionConfig::adaptive(tau, min, min + extra);
        let adaptive = partition(&stream, &cfg).unwrap();
        prop_assert_eq!(concat_ids(&adaptive), expected);
        for (i, w) in adaptive.iter().enumerate() {
            prop_assert_eq!(w.window_id(), i);
        }
    }

    #[test]
    fn fixed_windows_equal_but_last(seed in any::<u64>(), len in 1..60usize, size in 1..15usize) {
        let mut r = rng(seed);
        let ws = fixed_partition(&random_stream(&mut r, len), &PartitionConfig::fixed(size)).unwrap();
        for w in &ws[..ws.len() - 1] {
            prop_assert_eq!(w.len(), size);
        }
        prop_assert!(ws.last().unwrap().len() <= size);
    }

    #[test]
    fn adaptive_window_lengths_bounded(seed in any::<u64>(), len in 1..60usize, tau in 0.01f64..0.5, min in 1..6usize, extra in 0..10usize) {
        let mut r = rng(seed);
        let cfg = PartitionConfig::adaptive(tau, min, min + extra);
        let ws = adaptive_partition(&random_stream(&mut r, len), &cfg).unwrap();
        for w in &ws {
            let remaining = len - w.start_index();
            prop_assert!(w.len() >= cfg.min_window.min(remaining));
            prop_assert!(w.len() <= cfg.max_window);
        }
    }

    #[test]
    fn cuts_ignore_label_names(seed in any::<u64>(), tau in 0.01f64..0.5) {
        let mut r = rng(seed);
        let stream = random_stream(&mut r, 30);
        let renamed: Vec<Snapshot> = stream.iter().map(relabel).collect();
        let cfg = PartitionConfig::adaptive(tau, 2, 10);
        let a: Vec<usize> = adaptive_partition(&stream, &cfg).unwrap().iter().map(|w| w.start_index()).collect();
        let b: Vec<usize> = adaptive_partition(&renamed, &cfg).unwrap().iter().map(|w| w.start_index()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn distributions_sum_to_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let edges = r.gen_range(0..10);
        let g = random_snapshot(&mut r, 0, 7, edges, 3, 3);
        prop_assert!((snapshot_distribution(&g).total() - 1.0).abs() < 1e-9);
    }
}
