#![allow(dead_code)]

use std::collections::BTreeSet;

use evomine::windowing::CutReason;
use evomine::{Label, Pattern, Snapshot, TimeWindow};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn l(s: &str) -> Label {
    Label::new(s).unwrap()
}

const NODE_LABELS: [&str; 4] = ["A", "B", "C", "D"];
const EDGE_LABELS: [&str; 4] = ["x", "y", "z", "w"];

/// Random simple graph with `nodes` nodes and up to `edges` distinct edges.
pub fn random_snapshot(
    rng: &mut TestRng,
    time: u64,
    nodes: usize,
    edges: usize,
    node_labels: usize,
    edge_labels: usize,
) -> Snapshot {
    let ns: Vec<(u64, Label)> = (0..nodes as u64)
        .map(|i| (i, l(NODE_LABELS[rng.gen_range(0..node_labels)])))
        .collect();
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for a in 0..nodes as u64 {
        for b in a + 1..nodes as u64 {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(rng);
    let es = pairs
        .into_iter()
        .take(edges)
        .map(|(a, b)| (a, b, l(EDGE_LABELS[rng.gen_range(0..edge_labels)])))
        .collect();
    Snapshot::new(time, ns, es).unwrap()
}

pub fn window(id: usize, snaps: Vec<Snapshot>) -> TimeWindow {
    TimeWindow::new(id, 0, snaps, CutReason::EndOfStream).unwrap()
}

/// Random connected pattern: a random spanning tree plus extra edges.
pub fn random_pattern(
    rng: &mut TestRng,
    max_nodes: usize,
    node_labels: usize,
    edge_labels: usize,
) -> Pattern {
    let n = rng.gen_range(2..=max_nodes);
    let nodes: Vec<Label> = (0..n)
        .map(|_| l(NODE_LABELS[rng.gen_range(0..node_labels)]))
        .collect();
    let mut pairs = BTreeSet::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        pairs.insert((u, v));
        edges.push((u, v, l(EDGE_LABELS[rng.gen_range(0..edge_labels)])));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && pairs.insert((a.min(b), a.max(b))) {
            edges.push((a, b, l(EDGE_LABELS[rng.gen_range(0..edge_labels)])));
        }
    }
    Pattern::new(nodes, edges).unwrap()
}

/// Same pattern with node ids shuffled and edge endpoints/order shuffled.
pub fn permuted(rng: &mut TestRng, p: &Pattern) -> Pattern {
    let n = p.nodes().len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut nodes = vec![l("A"); n];
    for (i, lab) in p.nodes().iter().enumerate() {
        nodes[perm[i]] = lab.clone();
    }
    let mut edges: Vec<(usize, usize, Label)> = p
        .edges()
        .iter()
        .map(|(a, b, lab)| {
            if rng.gen_bool(0.5) {
                (perm[*a], perm[*b], lab.clone())
            } else {
                (perm[*b], perm[*a], lab.clone())
            }
        })
        .collect();
    edges.shuffle(rng);
    Pattern::new(nodes, edges).unwrap()
}

pub fn pattern(nodes: &[&str], edges: &[(usize, usize, &str)]) -> Pattern {
    Pattern::new(
        nodes.iter().map(|s| l(s)).collect(),
        edges.iter().map(|(a, b, s)| (*a, *b, l(s))).collect(),
    )
    .unwrap()
}

pub fn snapshot(time: u64, nodes: &[(u64, &str)], edges: &[(u64, u64, &str)]) -> Snapshot {
    Snapshot::new(
        time,
        nodes.iter().map(|(i, s)| (*i, l(s))).collect(),
        edges.iter().map(|(a, b, s)| (*a, *b, l(s))).collect(),
    )
    .unwrap()
}

/// 100 snapshots; edge labels drawn x:0.9/y:0.1 before index 50 and
/// x:0.1/y:0.9 from index 50 on. Node labels stay uniform over A, B.
pub fn label_shift_stream(seed: u64) -> Vec<Snapshot> {
    let mut r = rng(seed);
    (0..100u64)
        .map(|t| {
            let p_x = if t < 50 { 0.9 } else { 0.1 };
            let nodes: Vec<(u64, Label)> = (0..30u64)
                .map(|i| (i, l(if r.gen_bool(0.5) { "A" } else { "B" })))
                .collect();
            let mut pairs = BTreeSet::new();
            let mut edges = Vec::new();
            while edges.len() < 60 {
                let a = r.gen_range(0..30u64);
                let b = r.gen_range(0..30u64);
                if a != b && pairs.insert((a.min(b), a.max(b))) {
                    edges.push((a, b, l(if r.gen_bool(p_x) { "x" } else { "y" })));
                }
            }
            Snapshot::new(t, nodes, edges).unwrap()
        })
        .collect()
}
