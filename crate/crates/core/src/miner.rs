//! Frequent connected pattern mining per time window.
//!
//! Enumeration is pattern growth over minimum DFS codes: every frequent
//! code is extended along its rightmost path, children that are not
//! minimal codes are discarded, and infrequent children are pruned (a
//! pattern is never more frequent than its sub-patterns).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::dfs_code::{self, DfsCode, DfsEdge, ExtensionKey};
use crate::graph::{is_subgraph, Label, LabelRanks, Pattern, Snapshot};
use crate::rational::Rational;
use crate::windowing::TimeWindow;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MineError {
    #[error("invalid mining config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningConfig {
    /// A pattern is frequent when its relative frequency is strictly greater.
    pub alpha: Rational,
    pub max_edges: usize,
}

impl MiningConfig {
    pub fn new(alpha: Rational, max_edges: usize) -> Result<Self, MineError> {
        let c = MiningConfig { alpha, max_edges };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), MineError> {
        if self.alpha > Rational::from_integer(1) {
            return Err(MineError::InvalidConfig("alpha must lie in [0, 1]".into()));
        }
        if self.max_edges < 1 {
            return Err(MineError::InvalidConfig("max_edges must be >= 1".into()));
        }
        Ok(())
    }
}

/// Relative frequency `support / window_size`, kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub support: u32,
    pub window_size: u32,
}

impl Frequency {
    pub fn new(support: u32, window_size: u32) -> Self {
        assert!(window_size > 0 && support <= window_size);
        Frequency {
            support,
            window_size,
        }
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.support as u64, self.window_size as u64)
    }

    pub fn is_zero(&self) -> bool {
        self.support == 0
    }

    pub fn exceeds(&self, alpha: &Rational) -> bool {
        self.support as u64 * *alpha.denom() > *alpha.numer() * self.window_size as u64
    }
}

impl Ord for Frequency {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.support as u64 * other.window_size as u64)
            .cmp(&(other.support as u64 * self.window_size as u64))
    }
}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub pattern: Pattern,
    pub frequency: Frequency,
}

/// Per-window map from canonical code to pattern and exact frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub window_id: usize,
    pub window_size: u32,
    pub entries: BTreeMap<String, TableEntry>,
}

impl FrequencyTable {
    pub fn new(window_id: usize, window_size: u32) -> Self {
        FrequencyTable {
            window_id,
            window_size,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, pattern: Pattern, frequency: Frequency) {
        self.entries.insert(
            pattern.code().to_string(),
            TableEntry { pattern, frequency },
        );
    }

    pub fn get(&self, code: &str) -> Option<&TableEntry> {
        self.entries.get(code)
    }

    pub fn frequency(&self, code: &str) -> Option<Frequency> {
        self.entries.get(code).map(|e| e.frequency)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.entries.values().map(|e| &e.pattern)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    /// Copy holding only the given codes (missing codes are skipped).
    pub fn restrict<'a>(&self, codes: impl IntoIterator<Item = &'a str>) -> FrequencyTable {
        let mut t = FrequencyTable::new(self.window_id, self.window_size);
        for c in codes {
            if let Some(e) = self.entries.get(c) {
                t.entries.insert(c.to_string(), e.clone());
            }
        }
        t
    }
}

/// `|{G in W : P ⊆ G}| / |W|`.
pub fn frequency(pattern: &Pattern, window: &TimeWindow) -> Frequency {
    let support = window
        .snapshots()
        .iter()
        .filter(|g| is_subgraph(pattern, g))
        .count();
    Frequency::new(support as u32, window.len() as u32)
}

/// Exact frequency of every given pattern in the window, unfiltered.
pub fn evaluate_patterns<'a>(
    patterns: impl IntoIterator<Item = &'a Pattern>,
    window: &TimeWindow,
) -> FrequencyTable {
    let patterns: Vec<&Pattern> = patterns.into_iter().collect();
    let freqs: Vec<Frequency> = patterns.par_iter().map(|p| frequency(p, window)).collect();
    let mut table = FrequencyTable::new(window.window_id(), window.len() as u32);
    for (p, f) in patterns.into_iter().zip(freqs) {
        table.insert(p.clone(), f);
    }
    table
}

struct MinerGraph {
    labels: Vec<u32>,
    /// `(neighbor, edge label)`, sorted by neighbor.
    adj: Vec<Vec<(u32, u32)>>,
}

impl MinerGraph {
    fn edge_label(&self, a: u32, b: u32) -> Option<u32> {
        let list = &self.adj[a as usize];
        list.binary_search_by_key(&b, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }
}

/// Embeddings of one code, stored flat: `maps[i*nverts..(i+1)*nverts]`
/// maps code vertices of embedding `i` into graph `graphs[i]`.
#[derive(Default)]
struct Projection {
    nverts: usize,
    graphs: Vec<u32>,
    maps: Vec<u32>,
}

impl Projection {
    fn with_vertices(nverts: usize) -> Self {
        Projection {
            nverts,
            ..Default::default()
        }
    }

    fn push(&mut self, graph: u32, map: &[u32], extra: Option<u32>) {
        self.graphs.push(graph);
        self.maps.extend_from_slice(map);
        if let Some(w) = extra {
            self.maps.push(w);
        }
    }

    fn iter(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.graphs
            .iter()
            .copied()
            .zip(self.maps.chunks_exact(self.nverts))
    }

    /// Number of distinct graphs; embeddings are grouped by graph.
    fn support(&self) -> u32 {
        let mut n = 0;
        let mut last = u32::MAX;
        for &g in &self.graphs {
            if g != last {
                n += 1;
                last = g;
            }
        }
        n
    }
}

struct Miner<'a> {
    graphs: Vec<MinerGraph>,
    labels: Vec<Label>,
    config: &'a MiningConfig,
    window_size: u32,
}

impl Miner<'_> {
    fn frequent(&self, support: u32) -> bool {
        Frequency::new(support, self.window_size).exceeds(&self.config.alpha)
    }

    fn grow(&self, code: &mut DfsCode, proj: &Projection, out: &mut Vec<(DfsCode, u32)>) {
        if code.len() >= self.config.max_edges {
            return;
        }
        let path = dfs_code::rightmost_path(code);
        let rm = path[0];
        let n = proj.nverts;
        let mut in_code = vec![false; n * n];
        for e in code.iter() {
            in_code[e.from as usize * n + e.to as usize] = true;
            in_code[e.to as usize * n + e.from as usize] = true;
        }

        let mut children: BTreeMap<ExtensionKey, Projection> = BTreeMap::new();
        for (gi, map) in proj.iter() {
            let g = &self.graphs[gi as usize];
            let g_rm = map[rm as usize];
            for &v in &path[1..] {
                if in_code[rm as usize * n + v as usize] {
                    continue;
                }
                if let Some(el) = g.edge_label(g_rm, map[v as usize]) {
                    let key = ExtensionKey(DfsEdge {
                        from: rm,
                        to: v,
                        from_label: g.labels[g_rm as usize],
                        edge_label: el,
                        to_label: g.labels[map[v as usize] as usize],
                    });
                    children
                        .entry(key)
                        .or_insert_with(|| Projection::with_vertices(n))
                        .push(gi, map, None);
                }
            }
            for &v in &path {
                let g_v = map[v as usize];
                for &(w, el) in &g.adj[g_v as usize] {
                    if map.contains(&w) {
                        continue;
                    }
                    let key = ExtensionKey(DfsEdge {
                        from: v,
                        to: n as u32,
                        from_label: g.labels[g_v as usize],
                        edge_label: el,
                        to_label: g.labels[w as usize],
                    });
                    children
                        .entry(key)
                        .or_insert_with(|| Projection::with_vertices(n + 1))
                        .push(gi, map, Some(w));
                }
            }
        }

        for (ExtensionKey(edge), child) in children {
            let support = child.support();
            if !self.frequent(support) {
                continue;
            }
            code.push(edge);
            if dfs_code::is_min(code) {
                out.push((code.clone(), support));
                self.grow(code, &child, out);
            }
            code.pop();
        }
    }
}

/// All connected patterns with at most `max_edges` edges whose frequency in
/// the window is strictly greater than `alpha`.
pub fn mine_frequent(
    window: &TimeWindow,
    config: &MiningConfig,
) -> Result<FrequencyTable, MineError> {
    config.validate()?;
    let mut ranks = LabelRanks::default();
    for g in window.snapshots() {
        for (_, l) in g.nodes() {
            ranks.add(l);
        }
        for (_, _, l) in g.edges() {
            ranks.add(l);
        }
    }
    let ranks = ranks.freeze();
    let graphs: Vec<MinerGraph> = window
        .snapshots()
        .iter()
        .map(|g| to_miner_graph(g, &ranks))
        .collect();
    let miner = Miner {
        graphs,
        labels: ranks.labels().to_vec(),
        config,
        window_size: window.len() as u32,
    };

    let mut seeds: BTreeMap<ExtensionKey, Projection> = BTreeMap::new();
    for (gi, g) in miner.graphs.iter().enumerate() {
        for (u, list) in g.adj.iter().enumerate() {
            for &(v, el) in list {
                let (lu, lv) = (g.labels[u], g.labels[v as usize]);
                if lu > lv {
                    continue;
                }
                let key = ExtensionKey(DfsEdge {
                    from: 0,
                    to: 1,
                    from_label: lu,
                    edge_label: el,
                    to_label: lv,
                });
                seeds
                    .entry(key)
                    .or_insert_with(|| Projection::with_vertices(2))
                    .push(gi as u32, &[u as u32, v], None);
            }
        }
    }

    let found: Vec<Vec<(DfsCode, u32)>> = seeds
        .into_par_iter()
        .filter_map(|(ExtensionKey(edge), proj)| {
            let support = proj.support();
            if !miner.frequent(support) {
                return None;
            }
            let mut code = vec![edge];
            let mut out = vec![(code.clone(), support)];
            miner.grow(&mut code, &proj, &mut out);
            Some(out)
        })
        .collect();

    let mut table = FrequencyTable::new(window.window_id(), miner.window_size);
    for (code, support) in found.into_iter().flatten() {
        let pattern = Pattern::from_min_code(&code, &miner.labels);
        table.insert(pattern, Frequency::new(support, miner.window_size));
    }
    Ok(table)
}

fn to_miner_graph(g: &Snapshot, ranks: &crate::graph::FrozenRanks) -> MinerGraph {
    let n = g.node_count();
    let labels = (0..n as u32).map(|i| ranks.rank(g.label_at(i))).collect();
    let adj = (0..n as u32)
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|(w, l)| (*w, ranks.rank(l)))
                .collect()
        })
        .collect();
    MinerGraph { labels, adj }
}
