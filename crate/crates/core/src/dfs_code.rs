//! Depth-first search codes over small labeled undirected graphs.
//!
//! A DFS code is the sequence of edges visited by a depth-first traversal,
//! each written as `(from, to, from_label, edge_label, to_label)` where `from`
//! and `to` are discovery indices. Forward edges discover a new vertex
//! (`from < to`); backward edges close a cycle to a vertex on the rightmost
//! path (`from > to`). The minimum code under the extension order below is a
//! canonical form: two graphs have equal minimum codes iff they are
//! isomorphic.
//!
//! Labels here are dense `u32` ranks. Callers must assign ranks in the same
//! order as the label strings so that codes agree across graphs.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DfsEdge {
    pub from: u32,
    pub to: u32,
    pub from_label: u32,
    pub edge_label: u32,
    pub to_label: u32,
}

impl DfsEdge {
    pub fn is_forward(&self) -> bool {
        self.from < self.to
    }

    /// Order between two edges that extend the same code prefix.
    ///
    /// Backward edges precede forward edges. Backward edges (all leaving the
    /// rightmost vertex) are ordered by target, then edge label. Forward edges
    /// growing from deeper rightmost-path vertices come first, then by labels.
    pub fn extension_cmp(&self, other: &Self) -> Ordering {
        match (self.is_forward(), other.is_forward()) {
            (false, false) => (self.to, self.edge_label).cmp(&(other.to, other.edge_label)),
            (false, true) => Ordering::Less,
            (true, false) => Ordering::Greater,
            (true, true) => other
                .from
                .cmp(&self.from)
                .then(self.from_label.cmp(&other.from_label))
                .then(self.edge_label.cmp(&other.edge_label))
                .then(self.to_label.cmp(&other.to_label)),
        }
    }
}

/// Wrapper giving [`DfsEdge`] the extension order, for use as a map key
/// among siblings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionKey(pub DfsEdge);

impl Ord for ExtensionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.extension_cmp(&other.0)
    }
}

impl PartialOrd for ExtensionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type DfsCode = Vec<DfsEdge>;

/// Number of vertices a code discovers.
pub fn vertex_count(code: &[DfsEdge]) -> usize {
    code.iter()
        .map(|e| e.from.max(e.to) as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Vertex ids on the rightmost path, from the rightmost vertex back to the root.
pub fn rightmost_path(code: &[DfsEdge]) -> Vec<u32> {
    let n = vertex_count(code);
    if n == 0 {
        return Vec::new();
    }
    let mut parent = vec![u32::MAX; n];
    for e in code.iter().filter(|e| e.is_forward()) {
        parent[e.to as usize] = e.from;
    }
    let mut path = vec![(n - 1) as u32];
    let mut v = n - 1;
    while parent[v] != u32::MAX {
        v = parent[v] as usize;
        path.push(v as u32);
    }
    path
}

/// Vertex labels implied by a code, indexed by discovery id.
pub fn vertex_labels(code: &[DfsEdge]) -> Vec<u32> {
    let mut labels = vec![0; vertex_count(code)];
    for e in code {
        labels[e.from as usize] = e.from_label;
        labels[e.to as usize] = e.to_label;
    }
    labels
}

/// Small adjacency-list graph with ranked labels.
#[derive(Debug, Clone)]
pub struct CodeGraph {
    pub labels: Vec<u32>,
    /// `(neighbor, edge_label, edge_id)`, sorted by neighbor.
    pub adj: Vec<Vec<(u32, u32, u32)>>,
    pub edge_count: usize,
}

impl CodeGraph {
    pub fn new(labels: Vec<u32>, edges: &[(u32, u32, u32)]) -> Self {
        let mut adj = vec![Vec::new(); labels.len()];
        for (id, &(a, b, l)) in edges.iter().enumerate() {
            adj[a as usize].push((b, l, id as u32));
            adj[b as usize].push((a, l, id as u32));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        CodeGraph {
            labels,
            adj,
            edge_count: edges.len(),
        }
    }

    pub fn from_code(code: &[DfsEdge]) -> Self {
        let edges: Vec<_> = code.iter().map(|e| (e.from, e.to, e.edge_label)).collect();
        Self::new(vertex_labels(code), &edges)
    }

    pub fn is_connected(&self) -> bool {
        if self.labels.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.labels.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _, _) in &self.adj[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone)]
struct Embedding {
    map: Vec<u32>,
    used: Vec<bool>,
}

/// Outcome of building the minimum code while comparing against a candidate.
enum Build {
    Complete(DfsCode),
    /// The candidate code is not minimal.
    Smaller,
}

fn build_min(graph: &CodeGraph, against: Option<&[DfsEdge]>) -> Build {
    let mut code: DfsCode = Vec::with_capacity(graph.edge_count);
    let mut embs: Vec<Embedding> = Vec::new();

    // first edge
    let mut best: Option<DfsEdge> = None;
    for (u, list) in graph.adj.iter().enumerate() {
        for &(v, l, _) in list {
            let e = DfsEdge {
                from: 0,
                to: 1,
                from_label: graph.labels[u],
                edge_label: l,
                to_label: graph.labels[v as usize],
            };
            if best.is_none_or(|b| e.extension_cmp(&b) == Ordering::Less) {
                best = Some(e);
            }
        }
    }
    let Some(first) = best else {
        return Build::Complete(code);
    };
    for (u, list) in graph.adj.iter().enumerate() {
        if graph.labels[u] != first.from_label {
            continue;
        }
        for &(v, l, id) in list {
            if l == first.edge_label && graph.labels[v as usize] == first.to_label {
                let mut used = vec![false; graph.edge_count];
                used[id as usize] = true;
                embs.push(Embedding {
                    map: vec![u as u32, v],
                    used,
                });
            }
        }
    }
    if let Some(c) = against {
        match first.extension_cmp(&c[0]) {
            Ordering::Less => return Build::Smaller,
            Ordering::Greater => unreachable!("candidate code is not a code of its own graph"),
            Ordering::Equal => {}
        }
    }
    code.push(first);

    while code.len() < graph.edge_count {
        let path = rightmost_path(&code);
        let rm = path[0];
        let n = embs[0].map.len() as u32;
        let mut best: Option<DfsEdge> = None;
        let mut consider = |e: DfsEdge| {
            if best.is_none_or(|b| e.extension_cmp(&b) == Ordering::Less) {
                best = Some(e);
            }
        };
        for emb in &embs {
            let g_rm = emb.map[rm as usize];
            for &v in &path[1..] {
                let g_v = emb.map[v as usize];
                if let Some(&(_, l, id)) = find_edge(graph, g_rm, g_v) {
                    if !emb.used[id as usize] {
                        consider(DfsEdge {
                            from: rm,
                            to: v,
                            from_label: graph.labels[g_rm as usize],
                            edge_label: l,
                            to_label: graph.labels[g_v as usize],
                        });
                    }
                }
            }
            for &v in &path {
                let g_v = emb.map[v as usize];
                for &(w, l, _) in &graph.adj[g_v as usize] {
                    if !emb.map.contains(&w) {
                        consider(DfsEdge {
                            from: v,
                            to: n,
                            from_label: graph.labels[g_v as usize],
                            edge_label: l,
                            to_label: graph.labels[w as usize],
                        });
                    }
                }
            }
        }
        // A connected graph always has an extension until all edges are used.
        let Some(next) = best else {
            break;
        };
        if let Some(c) = against {
            match next.extension_cmp(&c[code.len()]) {
                Ordering::Less => return Build::Smaller,
                Ordering::Greater => unreachable!("candidate code is not a code of its own graph"),
                Ordering::Equal => {}
            }
        }
        let mut grown = Vec::with_capacity(embs.len());
        for emb in &embs {
            let g_from = emb.map[next.from as usize];
            if next.is_forward() {
                for &(w, l, id) in &graph.adj[g_from as usize] {
                    if l == next.edge_label
                        && graph.labels[w as usize] == next.to_label
                        && !emb.map.contains(&w)
                    {
                        let mut e = emb.clone();
                        e.map.push(w);
                        e.used[id as usize] = true;
                        grown.push(e);
                    }
                }
            } else {
                let g_to = emb.map[next.to as usize];
                if let Some(&(_, l, id)) = find_edge(graph, g_from, g_to) {
                    if l == next.edge_label && !emb.used[id as usize] {
                        let mut e = emb.clone();
                        e.used[id as usize] = true;
                        grown.push(e);
                    }
                }
            }
        }
        embs = grown;
        code.push(next);
    }
    Build::Complete(code)
}

fn find_edge(graph: &CodeGraph, a: u32, b: u32) -> Option<&(u32, u32, u32)> {
    let list = &graph.adj[a as usize];
    list.binary_search_by_key(&b, |&(w, _, _)| w)
        .ok()
        .map(|i| &list[i])
}

/// Minimum DFS code of a connected graph with at least one edge.
pub fn min_code(graph: &CodeGraph) -> DfsCode {
    match build_min(graph, None) {
        Build::Complete(code) => code,
        Build::Smaller => unreachable!(),
    }
}

/// Whether `code` is the minimum DFS code of the graph it describes.
pub fn is_min(code: &[DfsEdge]) -> bool {
    if code.len() <= 1 {
        return code.first().is_none_or(|e| e.from_label <= e.to_label);
    }
    let graph = CodeGraph::from_code(code);
    matches!(build_min(&graph, Some(code)), Build::Complete(_))
}
