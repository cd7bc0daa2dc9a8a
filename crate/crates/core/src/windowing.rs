//! Partitioning of the snapshot stream into consecutive time windows.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{Label, Snapshot};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindowError {
    #[error("snapshot stream is empty")]
    EmptyStream,
    #[error("window must hold at least one snapshot")]
    EmptyWindow,
    #[error(
        "snapshot time indices must strictly increase within a window (saw {prev} then {next})"
    )]
    Unordered { prev: u64, next: u64 },
    #[error("invalid partition config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub mode: PartitionMode,
    pub fixed_size: usize,
    /// Jensen-Shannon divergence threshold in (0, 1], base-2 logs.
    pub divergence_threshold: f64,
    pub min_window: usize,
    pub max_window: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            mode: PartitionMode::Fixed,
            fixed_size: 10,
            divergence_threshold: 0.1,
            min_window: 5,
            max_window: 50,
        }
    }
}

impl PartitionConfig {
    pub fn fixed(size: usize) -> Self {
        PartitionConfig {
            mode: PartitionMode::Fixed,
            fixed_size: size,
            ..Default::default()
        }
    }

    pub fn adaptive(tau: f64, min_window: usize, max_window: usize) -> Self {
        PartitionConfig {
            mode: PartitionMode::Adaptive,
            divergence_threshold: tau,
            min_window,
            max_window,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), WindowError> {
        let bad = |m: &str| Err(WindowError::InvalidConfig(m.to_string()));
        if self.fixed_size < 1 {
            return bad("fixed_size must be >= 1");
        }
        if !(self.divergence_threshold > 0.0 && self.divergence_threshold <= 1.0) {
            return bad("divergence threshold must lie in (0, 1]");
        }
        if self.min_window < 1 || self.max_window < 1 {
            return bad("min_window and max_window must be >= 1");
        }
        if self.min_window > self.max_window {
            return bad("min_window must not exceed max_window");
        }
        Ok(())
    }
}

/// Why a window was closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutReason {
    /// Fixed-size window filled.
    Fixed,
    /// Next snapshot diverged from the window's aggregate distribution.
    Divergence,
    /// Adaptive window reached `max_window`.
    MaxWindow,
    EndOfStream,
}

impl fmt::Display for CutReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutReason::Fixed => "fixed",
            CutReason::Divergence => "divergence",
            CutReason::MaxWindow => "max_window",
            CutReason::EndOfStream => "end_of_stream",
        })
    }
}

/// A contiguous run of snapshots from the stream.
#[derive(Debug, Clone)]
pub struct TimeWindow {
    window_id: usize,
    start_index: usize,
    snapshots: Vec<Snapshot>,
    cut_reason: CutReason,
}

impl TimeWindow {
    pub fn new(
        window_id: usize,
        start_index: usize,
        snapshots: Vec<Snapshot>,
        cut_reason: CutReason,
    ) -> Result<Self, WindowError> {
        if snapshots.is_empty() {
            return Err(WindowError::EmptyWindow);
        }
        for w in snapshots.windows(2) {
            if w[0].time_index() >= w[1].time_index() {
                return Err(WindowError::Unordered {
                    prev: w[0].time_index(),
                    next: w[1].time_index(),
                });
            }
        }
        Ok(TimeWindow {
            window_id,
            start_index,
            snapshots,
            cut_reason,
        })
    }

    pub fn window_id(&self) -> usize {
        self.window_id
    }

    /// Position of the first snapshot in the stream.
    pub fn start_index(&self) -> usize {
        self.start_index
    }

    /// Position one past the last snapshot in the stream.
    pub fn end_index(&self) -> usize {
        self.start_index + self.snapshots.len()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn cut_reason(&self) -> CutReason {
        self.cut_reason
    }
}

fn check_order(stream: &[Snapshot]) -> Result<(), WindowError> {
    if stream.is_empty() {
        return Err(WindowError::EmptyStream);
    }
    for w in stream.windows(2) {
        if w[0].time_index() >= w[1].time_index() {
            return Err(WindowError::Unordered {
                prev: w[0].time_index(),
                next: w[1].time_index(),
            });
        }
    }
    Ok(())
}

fn build(stream: &[Snapshot], cuts: &[(usize, CutReason)]) -> Vec<TimeWindow> {
    let mut start = 0;
    cuts.iter()
        .enumerate()
        .map(|(id, &(end, reason))| {
            let w = TimeWindow {
                window_id: id,
                start_index: start,
                snapshots: stream[start..end].to_vec(),
                cut_reason: reason,
            };
            start = end;
            w
        })
        .collect()
}

/// Splits the stream into windows of `fixed_size`; a shorter remainder
/// window is kept at the end.
pub fn fixed_partition(
    stream: &[Snapshot],
    config: &PartitionConfig,
) -> Result<Vec<TimeWindow>, WindowError> {
    config.validate()?;
    check_order(stream)?;
    let mut cuts = Vec::new();
    let mut end = 0;
    while end < stream.len() {
        end = (end + config.fixed_size).min(stream.len());
        let reason = if end == stream.len() {
            CutReason::EndOfStream
        } else {
            CutReason::Fixed
        };
        cuts.push((end, reason));
    }
    Ok(build(stream, &cuts))
}

/// Label histogram of a snapshot, keyed by `(side, label)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: BTreeMap<(Side, Label), f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Node,
    Edge,
}

impl Distribution {
    /// True for a snapshot with no nodes.
    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn get(&self, side: Side, label: &str) -> f64 {
        self.mass
            .iter()
            .find(|((s, l), _)| *s == side && l.as_str() == label)
            .map_or(0.0, |(_, m)| *m)
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Side, Label), &f64)> {
        self.mass.iter()
    }
}

/// Node-label and edge-label histograms, each side scaled to mass 0.5 and
/// concatenated. A side with no items is dropped and the other side
/// rescaled to 1. A snapshot without nodes yields an empty distribution.
pub fn snapshot_distribution(snapshot: &Snapshot) -> Distribution {
    let mut node_counts: BTreeMap<Label, usize> = BTreeMap::new();
    for (_, l) in snapshot.nodes() {
        *node_counts.entry(l.clone()).or_default() += 1;
    }
    let mut edge_counts: BTreeMap<Label, usize> = BTreeMap::new();
    for (_, _, l) in snapshot.edges() {
        *edge_counts.entry(l.clone()).or_default() += 1;
    }
    let sides = [(Side::Node, node_counts), (Side::Edge, edge_counts)];
    let present = sides.iter().filter(|(_, c)| !c.is_empty()).count();
    let mut mass = BTreeMap::new();
    for (side, counts) in sides {
        let total: usize = counts.values().sum();
        for (label, c) in counts {
            mass.insert((side, label), c as f64 / total as f64 / present as f64);
        }
    }
    Distribution { mass }
}

/// Jensen-Shannon divergence with base-2 logs, in [0, 1].
///
/// An empty distribution carries no evidence and diverges from nothing.
pub fn js_divergence(p: &Distribution, q: &Distribution) -> f64 {
    if p.is_empty() || q.is_empty() {
        return 0.0;
    }
    let mut keys: Vec<&(Side, Label)> = p.mass.keys().chain(q.mass.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut js = 0.0;
    for k in keys {
        let a = p.mass.get(k).copied().unwrap_or(0.0);
        let b = q.mass.get(k).copied().unwrap_or(0.0);
        let m = 0.5 * (a + b);
        if a > 0.0 {
            js += 0.5 * a * (a / m).log2();
        }
        if b > 0.0 {
            js += 0.5 * b * (b / m).log2();
        }
    }
    js.clamp(0.0, 1.0)
}

/// Running mean of the distributions of the open window.
#[derive(Default)]
struct Aggregate {
    sum: BTreeMap<(Side, Label), f64>,
    count: usize,
}

impl Aggregate {
    fn add(&mut self, d: &Distribution) {
        if d.is_empty() {
            return;
        }
        for (k, v) in &d.mass {
            *self.sum.entry(k.clone()).or_default() += v;
        }
        self.count += 1;
    }

    fn mean(&self) -> Distribution {
        let n = self.count.max(1) as f64;
        Distribution {
            mass: self.sum.iter().map(|(k, v)| (k.clone(), v / n)).collect(),
        }
    }
}

/// Cuts the stream where a snapshot's label distribution diverges from
/// the open window by more than the threshold, once the window holds at
/// least `min_window` snapshots. Windows never exceed `max_window`.
pub fn adaptive_partition(
    stream: &[Snapshot],
    config: &PartitionConfig,
) -> Result<Vec<TimeWindow>, WindowError> {
    config.validate()?;
    check_order(stream)?;
    let dists: Vec<Distribution> = stream.iter().map(snapshot_distribution).collect();
    let mut cuts = Vec::new();
    let mut agg = Aggregate::default();
    let mut open = 0usize;
    for (i, d) in dists.iter().enumerate() {
        if open > 0 {
            let diverged = open >= config.min_window
                && js_divergence(d, &agg.mean()) > config.divergence_threshold;
            if diverged || open >= config.max_window {
                let reason = if diverged {
                    CutReason::Divergence
                } else {
                    CutReason::MaxWindow
                };
                cuts.push((i, reason));
                agg = Aggregate::default();
                open = 0;
            }
        }
        agg.add(d);
        open += 1;
    }
    cuts.push((stream.len(), CutReason::EndOfStream));
    Ok(build(stream, &cuts))
}

/// Dispatches on the configured mode.
pub fn partition(
    stream: &[Snapshot],
    config: &PartitionConfig,
) -> Result<Vec<TimeWindow>, WindowError> {
    match config.mode {
        PartitionMode::Fixed => fixed_partition(stream, config),
        PartitionMode::Adaptive => adaptive_partition(stream, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn plain(t: u64) -> Snapshot {
        Snapshot::new(t, vec![(0, l("A")), (1, l("B"))], vec![(0, 1, l("x"))]).unwrap()
    }

    fn stream(n: usize) -> Vec<Snapshot> {
        (0..n as u64).map(plain).collect()
    }

    fn sizes(ws: &[TimeWindow]) -> Vec<usize> {
        ws.iter().map(|w| w.len()).collect()
    }

    #[test]
    fn fixed_exact_division() {
        let ws = fixed_partition(&stream(10), &PartitionConfig::fixed(5)).unwrap();
        assert_eq!(sizes(&ws), vec![5, 5]);
    }

    #[test]
    fn fixed_keeps_remainder() {
        let ws = fixed_partition(&stream(7), &PartitionConfig::fixed(3)).unwrap();
        assert_eq!(sizes(&ws), vec![3, 3, 1]);
        assert_eq!(ws[2].start_index(), 6);
        assert_eq!(ws[2].cut_reason(), CutReason::EndOfStream);
    }

    #[test]
    fn fixed_short_stream() {
        let ws = fixed_partition(&stream(4), &PartitionConfig::fixed(10)).unwrap();
        assert_eq!(sizes(&ws), vec![4]);
    }

    #[test]
    fn empty_stream_rejected() {
        assert_eq!(
            fixed_partition(&[], &PartitionConfig::fixed(3)).unwrap_err(),
            WindowError::EmptyStream
        );
        assert_eq!(
            adaptive_partition(&[], &PartitionConfig::adaptive(0.1, 1, 5)).unwrap_err(),
            WindowError::EmptyStream
        );
    }

    #[test]
    fn adaptive_identical_stream_capped_by_max_window() {
        let ws = adaptive_partition(&stream(23), &PartitionConfig::adaptive(0.1, 2, 10)).unwrap();
        assert_eq!(sizes(&ws), vec![10, 10, 3]);
        assert_eq!(ws[0].cut_reason(), CutReason::MaxWindow);
    }

    #[test]
    fn adaptive_single_snapshot() {
        let ws = adaptive_partition(&stream(1), &PartitionConfig::adaptive(0.1, 5, 10)).unwrap();
        assert_eq!(sizes(&ws), vec![1]);
    }

    #[test]
    fn adaptive_min_window_longer_than_stream() {
        let mut s = stream(3);
        s.push(Snapshot::new(3, vec![(0, l("Q")), (1, l("R"))], vec![(0, 1, l("z"))]).unwrap());
        let ws = adaptive_partition(&s, &PartitionConfig::adaptive(0.1, 10, 20)).unwrap();
        assert_eq!(sizes(&ws), vec![4]);
    }

    #[test]
    fn distribution_without_edges_renormalizes_node_side() {
        let s = Snapshot::new(
            0,
            vec![(0, l("A")), (1, l("A")), (2, l("B")), (3, l("B"))],
            vec![],
        )
        .unwrap();
        let d = snapshot_distribution(&s);
        assert!((d.get(Side::Node, "A") - 0.5).abs() < 1e-12);
        assert!((d.get(Side::Node, "B") - 0.5).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distribution_half_split() {
        let s = Snapshot::new(
            0,
            vec![(0, l("A")), (1, l("A")), (2, l("B"))],
            vec![(0, 1, l("x")), (1, 2, l("x"))],
        )
        .unwrap();
        let d = snapshot_distribution(&s);
        assert!((d.get(Side::Node, "A") - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.get(Side::Node, "B") - 1.0 / 6.0).abs() < 1e-12);
        assert!((d.get(Side::Edge, "x") - 0.5).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn js_of_identical_multisets_is_zero() {
        let a = snapshot_distribution(&plain(0));
        let b = snapshot_distribution(&plain(1));
        assert_eq!(js_divergence(&a, &b), 0.0);
    }

    #[test]
    fn js_of_disjoint_supports_is_one() {
        let a = snapshot_distribution(&plain(0));
        let b = snapshot_distribution(
            &Snapshot::new(1, vec![(0, l("Q")), (1, l("R"))], vec![(0, 1, l("z"))]).unwrap(),
        );
        assert!((js_divergence(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_snapshots_do_not_diverge() {
        let e = Snapshot::new(0, vec![], vec![]).unwrap();
        let d = snapshot_distribution(&e);
        assert!(d.is_empty());
        assert_eq!(js_divergence(&d, &d), 0.0);
    }

    #[test]
    fn config_validation() {
        let mut c = PartitionConfig::adaptive(0.1, 6, 5);
        assert!(c.validate().is_err());
        c.min_window = 5;
        assert!(c.validate().is_ok());
        c.divergence_threshold = 0.0;
        assert!(c.validate().is_err());
        assert!(PartitionConfig::fixed(0).validate().is_err());
    }
}
