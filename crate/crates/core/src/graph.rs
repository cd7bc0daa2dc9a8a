//! Labeled undirected graphs: snapshots of the network and connected patterns.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::dfs_code::{self, CodeGraph, DfsEdge};

/// Label used for inputs that carry no node or edge label.
pub const UNLABELED: &str = "∅";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid label {0:?}: labels must be non-empty and free of whitespace, control characters and '(),'")]
    InvalidLabel(String),
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("edge ({0}, {1}) references a missing node")]
    MissingEndpoint(u64, u64),
    #[error("self-loop on node {0}")]
    SelfLoop(u64),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(u64, u64),
    #[error("pattern has no edges")]
    EmptyPattern,
    #[error("pattern is not connected")]
    Disconnected,
    #[error("malformed canonical code: {0}")]
    MalformedCode(String),
}

/// Interned symbol label. Equality and order are by string content.
#[derive(Clone)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(s: &str) -> Result<Self, GraphError> {
        let bad = |c: char| c.is_whitespace() || c.is_control() || matches!(c, '(' | ')' | ',');
        if s.is_empty() || s.chars().any(bad) {
            return Err(GraphError::InvalidLabel(s.to_string()));
        }
        Ok(Label(Arc::from(s)))
    }

    pub fn unlabeled() -> Self {
        Label(Arc::from(UNLABELED))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Label {}

impl Hash for Label {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug)]
struct SnapshotData {
    time_index: u64,
    node_ids: Vec<u64>,
    node_labels: Vec<Label>,
    /// `(neighbor index, edge label)`, sorted by neighbor.
    adj: Vec<Vec<(u32, Label)>>,
    edge_count: usize,
    by_label: BTreeMap<Label, Vec<u32>>,
}

/// One observed state of the network at a discrete time point.
///
/// Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Snapshot(Arc<SnapshotData>);

impl Snapshot {
    pub fn new(
        time_index: u64,
        nodes: Vec<(u64, Label)>,
        edges: Vec<(u64, u64, Label)>,
    ) -> Result<Self, GraphError> {
        let mut nodes = nodes;
        nodes.sort_by_key(|(id, _)| *id);
        for w in nodes.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::DuplicateNode(w[0].0));
            }
        }
        let node_ids: Vec<u64> = nodes.iter().map(|(id, _)| *id).collect();
        let node_labels: Vec<Label> = nodes.into_iter().map(|(_, l)| l).collect();
        let index = |id: u64| node_ids.binary_search(&id).ok();

        let mut adj: Vec<Vec<(u32, Label)>> = vec![Vec::new(); node_ids.len()];
        let mut pairs = BTreeSet::new();
        for (a, b, label) in &edges {
            if a == b {
                return Err(GraphError::SelfLoop(*a));
            }
            let (Some(ia), Some(ib)) = (index(*a), index(*b)) else {
                return Err(GraphError::MissingEndpoint(*a, *b));
            };
            if !pairs.insert((ia.min(ib), ia.max(ib))) {
                return Err(GraphError::DuplicateEdge(*a.min(b), *a.max(b)));
            }
            adj[ia].push((ib as u32, label.clone()));
            adj[ib].push((ia as u32, label.clone()));
        }
        for list in &mut adj {
            list.sort_by_key(|(w, _)| *w);
        }
        let mut by_label: BTreeMap<Label, Vec<u32>> = BTreeMap::new();
        for (i, l) in node_labels.iter().enumerate() {
            by_label.entry(l.clone()).or_default().push(i as u32);
        }
        Ok(Snapshot(Arc::new(SnapshotData {
            time_index,
            node_ids,
            node_labels,
            adj,
            edge_count: edges.len(),
            by_label,
        })))
    }

    pub fn time_index(&self) -> u64 {
        self.0.time_index
    }

    pub fn node_count(&self) -> usize {
        self.0.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.0.edge_count
    }

    /// Nodes as `(id, label)` in increasing id order.
    pub fn nodes(&self) -> impl Iterator<Item = (u64, &Label)> + '_ {
        self.0
            .node_ids
            .iter()
            .copied()
            .zip(self.0.node_labels.iter())
    }

    /// Edges as `(a, b, label)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u64, u64, &Label)> + '_ {
        self.0.adj.iter().enumerate().flat_map(move |(i, list)| {
            list.iter()
                .filter(move |(w, _)| *w as usize > i)
                .map(move |(w, l)| (self.0.node_ids[i], self.0.node_ids[*w as usize], l))
        })
    }

    pub(crate) fn label_at(&self, i: u32) -> &Label {
        &self.0.node_labels[i as usize]
    }

    pub(crate) fn neighbors(&self, i: u32) -> &[(u32, Label)] {
        &self.0.adj[i as usize]
    }

    fn edge_label_between(&self, a: u32, b: u32) -> Option<&Label> {
        let list = &self.0.adj[a as usize];
        list.binary_search_by_key(&b, |(w, _)| *w)
            .ok()
            .map(|i| &list[i].1)
    }

    fn nodes_with_label(&self, label: &Label) -> &[u32] {
        self.0.by_label.get(label).map_or(&[], |v| v.as_slice())
    }
}

/// A connected labeled graph in canonical form.
///
/// Nodes are numbered in discovery order of the minimum DFS code, so two
/// isomorphic patterns are structurally identical and share one `code`.
#[derive(Debug, Clone)]
pub struct Pattern {
    nodes: Vec<Label>,
    edges: Vec<(usize, usize, Label)>,
    code: String,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for Pattern {}

impl Hash for Pattern {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code.cmp(&other.code)
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Pattern {
    /// Builds a pattern from nodes (indexed by position) and edges between them.
    pub fn new(nodes: Vec<Label>, edges: Vec<(usize, usize, Label)>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::EmptyPattern);
        }
        let mut pairs = BTreeSet::new();
        for (a, b, _) in &edges {
            if a == b {
                return Err(GraphError::SelfLoop(*a as u64));
            }
            if *a >= nodes.len() || *b >= nodes.len() {
                return Err(GraphError::MissingEndpoint(*a as u64, *b as u64));
            }
            if !pairs.insert((*a.min(b), *a.max(b))) {
                return Err(GraphError::DuplicateEdge(
                    *a.min(b) as u64,
                    *a.max(b) as u64,
                ));
            }
        }

        let mut vocab = LabelRanks::default();
        for l in &nodes {
            vocab.add(l);
        }
        for (_, _, l) in &edges {
            vocab.add(l);
        }
        let vocab = vocab.freeze();
        let ranked: Vec<_> = edges
            .iter()
            .map(|(a, b, l)| (*a as u32, *b as u32, vocab.rank(l)))
            .collect();
        let graph = CodeGraph::new(nodes.iter().map(|l| vocab.rank(l)).collect(), &ranked);
        if !graph.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let code = dfs_code::min_code(&graph);
        Ok(Self::from_min_code(&code, vocab.labels()))
    }

    /// Builds a pattern from a code already known to be minimal.
    pub(crate) fn from_min_code(code: &[DfsEdge], labels: &[Label]) -> Self {
        let nodes: Vec<Label> = dfs_code::vertex_labels(code)
            .into_iter()
            .map(|r| labels[r as usize].clone())
            .collect();
        let edges: Vec<(usize, usize, Label)> = code
            .iter()
            .map(|e| {
                (
                    e.from as usize,
                    e.to as usize,
                    labels[e.edge_label as usize].clone(),
                )
            })
            .collect();
        let mut text = String::new();
        for e in code {
            text.push_str(&format!(
                "({},{},{},{},{})",
                e.from,
                e.to,
                labels[e.from_label as usize],
                labels[e.edge_label as usize],
                labels[e.to_label as usize]
            ));
        }
        Pattern {
            nodes,
            edges,
            code: text,
        }
    }

    /// Parses a code string (any valid DFS code, not necessarily minimal)
    /// and returns the canonical pattern it describes.
    pub fn from_code(code: &str) -> Result<Self, GraphError> {
        let bad = |why: &str| GraphError::MalformedCode(format!("{why} in {code:?}"));
        let body = code.strip_prefix('(').and_then(|s| s.strip_suffix(')'));
        let Some(body) = body else {
            return Err(bad("expected parenthesized tuples"));
        };
        let mut nodes: Vec<Option<Label>> = Vec::new();
        let mut edges = Vec::new();
        for tuple in body.split(")(") {
            let f: Vec<&str> = tuple.split(',').collect();
            if f.len() != 5 {
                return Err(bad("tuple without five fields"));
            }
            let from: usize = f[0].parse().map_err(|_| bad("bad vertex id"))?;
            let to: usize = f[1].parse().map_err(|_| bad("bad vertex id"))?;
            let (fl, el, tl) = (Label::new(f[2])?, Label::new(f[3])?, Label::new(f[4])?);
            let needed = from.max(to) + 1;
            if needed > nodes.len().max(1) + 1 {
                return Err(bad("vertex id skips ahead"));
            }
            if nodes.len() < needed {
                nodes.resize(needed, None);
            }
            for (v, l) in [(from, fl), (to, tl)] {
                match &nodes[v] {
                    Some(prev) if *prev != l => return Err(bad("inconsistent vertex label")),
                    Some(_) => {}
                    None => nodes[v] = Some(l),
                }
            }
            edges.push((from, to, el));
        }
        let nodes = nodes
            .into_iter()
            .map(|l| l.ok_or_else(|| bad("unlabeled vertex")))
            .collect::<Result<Vec<_>, _>>()?;
        Pattern::new(nodes, edges)
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn nodes(&self) -> &[Label] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, Label)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Every connected pattern obtained by deleting one edge (and any node
    /// left isolated). Used for anti-monotonicity checks.
    pub fn one_edge_subpatterns(&self) -> Vec<Pattern> {
        let mut out = BTreeSet::new();
        if self.edges.len() < 2 {
            return Vec::new();
        }
        for skip in 0..self.edges.len() {
            let kept: Vec<_> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, e)| e.clone())
                .collect();
            let mut used = vec![false; self.nodes.len()];
            for (a, b, _) in &kept {
                used[*a] = true;
                used[*b] = true;
            }
            let mut remap = vec![usize::MAX; self.nodes.len()];
            let mut nodes = Vec::new();
            for (i, l) in self.nodes.iter().enumerate() {
                if used[i] {
                    remap[i] = nodes.len();
                    nodes.push(l.clone());
                }
            }
            let edges = kept
                .into_iter()
                .map(|(a, b, l)| (remap[a], remap[b], l))
                .collect();
            if let Ok(p) = Pattern::new(nodes, edges) {
                out.insert(p);
            }
        }
        out.into_iter().collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

/// Assigns dense ranks to labels in string order.
#[derive(Default)]
pub(crate) struct LabelRanks {
    set: BTreeSet<Label>,
}

pub(crate) struct FrozenRanks {
    labels: Vec<Label>,
}

impl LabelRanks {
    pub fn add(&mut self, l: &Label) {
        if !self.set.contains(l) {
            self.set.insert(l.clone());
        }
    }

    pub fn freeze(self) -> FrozenRanks {
        FrozenRanks {
            labels: self.set.into_iter().collect(),
        }
    }
}

impl FrozenRanks {
    pub fn rank(&self, l: &Label) -> u32 {
        self.labels.binary_search(l).expect("label was registered") as u32
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// Canonical code of a pattern. Equal for isomorphic patterns only.
pub fn canonical_code(pattern: &Pattern) -> &str {
    pattern.code()
}

/// Matching plan: pattern nodes in search order, each with an anchor
/// (an earlier node it is adjacent to) and the remaining back-edges to check.
struct Plan {
    order: Vec<usize>,
    anchor: Vec<Option<(usize, Label)>>,
    checks: Vec<Vec<(usize, Label)>>,
}

fn plan(pattern: &Pattern, snapshot: &Snapshot) -> Plan {
    let n = pattern.nodes.len();
    let mut adj: Vec<Vec<(usize, Label)>> = vec![Vec::new(); n];
    for (a, b, l) in &pattern.edges {
        adj[*a].push((*b, l.clone()));
        adj[*b].push((*a, l.clone()));
    }
    let rarity: Vec<usize> = pattern
        .nodes
        .iter()
        .map(|l| snapshot.nodes_with_label(l).len())
        .collect();

    let mut placed = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let first = (0..n)
        .min_by_key(|&v| (rarity[v], std::cmp::Reverse(adj[v].len()), v))
        .expect("pattern has nodes");
    placed[first] = 0;
    order.push(first);
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed[v] == usize::MAX)
            .filter(|&v| adj[v].iter().any(|(w, _)| placed[*w] != usize::MAX))
            .min_by_key(|&v| {
                let links = adj[v]
                    .iter()
                    .filter(|(w, _)| placed[*w] != usize::MAX)
                    .count();
                (
                    std::cmp::Reverse(links),
                    rarity[v],
                    std::cmp::Reverse(adj[v].len()),
                    v,
                )
            })
            .expect("pattern is connected");
        placed[next] = order.len();
        order.push(next);
    }

    let mut anchor = Vec::with_capacity(n);
    let mut checks = Vec::with_capacity(n);
    for (pos, &v) in order.iter().enumerate() {
        let mut back: Vec<(usize, Label)> = adj[v]
            .iter()
            .filter(|(w, _)| placed[*w] < pos)
            .map(|(w, l)| (placed[*w], l.clone()))
            .collect();
        back.sort_by_key(|(p, _)| *p);
        if back.is_empty() {
            anchor.push(None);
        } else {
            anchor.push(Some(back.remove(0)));
        }
        checks.push(back);
    }
    Plan {
        order,
        anchor,
        checks,
    }
}

/// Whether `pattern` occurs in `snapshot` as a (not necessarily induced)
/// subgraph with matching node and edge labels.
pub fn is_subgraph(pattern: &Pattern, snapshot: &Snapshot) -> bool {
    if pattern.nodes.len() > snapshot.node_count() || pattern.edges.len() > snapshot.edge_count() {
        return false;
    }
    let plan = plan(pattern, snapshot);
    let degree: Vec<usize> = {
        let mut d = vec![0; pattern.nodes.len()];
        for (a, b, _) in &pattern.edges {
            d[*a] += 1;
            d[*b] += 1;
        }
        plan.order.iter().map(|&v| d[v]).collect()
    };
    let labels: Vec<&Label> = plan.order.iter().map(|&v| &pattern.nodes[v]).collect();
    let mut image: Vec<u32> = Vec::with_capacity(labels.len());
    let mut used = vec![false; snapshot.node_count()];
    extend(&plan, &labels, &degree, snapshot, &mut image, &mut used)
}

fn extend(
    plan: &Plan,
    labels: &[&Label],
    degree: &[usize],
    snapshot: &Snapshot,
    image: &mut Vec<u32>,
    used: &mut [bool],
) -> bool {
    let pos = image.len();
    if pos == labels.len() {
        return true;
    }
    let feasible = |g: u32, image: &[u32], used: &[bool]| {
        !used[g as usize]
            && snapshot.label_at(g) == labels[pos]
            && snapshot.neighbors(g).len() >= degree[pos]
            && plan.checks[pos]
                .iter()
                .all(|(p, l)| snapshot.edge_label_between(g, image[*p]) == Some(l))
    };
    let try_candidate = |g: u32, image: &mut Vec<u32>, used: &mut [bool]| {
        if !feasible(g, image, used) {
            return false;
        }
        image.push(g);
        used[g as usize] = true;
        let found = extend(plan, labels, degree, snapshot, image, used);
        used[g as usize] = false;
        image.pop();
        found
    };
    match &plan.anchor[pos] {
        None => {
            for &g in snapshot.nodes_with_label(labels[pos]) {
                if try_candidate(g, image, used) {
                    return true;
                }
            }
        }
        Some((p, l)) => {
            let base = image[*p];
            for (g, el) in snapshot.neighbors(base) {
                if el == l && try_candidate(*g, image, used) {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn snap(nodes: &[(u64, &str)], edges: &[(u64, u64, &str)]) -> Snapshot {
        Snapshot::new(
            0,
            nodes.iter().map(|(i, s)| (*i, l(s))).collect(),
            edges.iter().map(|(a, b, s)| (*a, *b, l(s))).collect(),
        )
        .unwrap()
    }

    fn pat(nodes: &[&str], edges: &[(usize, usize, &str)]) -> Pattern {
        Pattern::new(
            nodes.iter().map(|s| l(s)).collect(),
            edges.iter().map(|(a, b, s)| (*a, *b, l(s))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_edge_matches() {
        let g = snap(&[(1, "A"), (2, "B")], &[(1, 2, "x")]);
        assert!(is_subgraph(&pat(&["A", "B"], &[(0, 1, "x")]), &g));
    }

    #[test]
    fn edge_label_mismatch() {
        let g = snap(&[(1, "A"), (2, "B")], &[(1, 2, "y")]);
        assert!(!is_subgraph(&pat(&["A", "B"], &[(0, 1, "x")]), &g));
    }

    #[test]
    fn reversed_path_same_code() {
        let a = pat(&["A", "B"], &[(0, 1, "x")]);
        let b = pat(&["B", "A"], &[(1, 0, "x")]);
        assert_eq!(a.code(), b.code());
        assert_eq!(a.code(), "(0,1,A,x,B)");
    }

    #[test]
    fn three_node_path_is_three_node_star() {
        let path = pat(&["A", "B", "C"], &[(0, 1, "x"), (1, 2, "x")]);
        let star = pat(&["B", "A", "C"], &[(0, 1, "x"), (0, 2, "x")]);
        assert_eq!(path.code(), star.code());
    }

    #[test]
    fn rejects_bad_patterns() {
        assert_eq!(
            Pattern::new(vec![l("A")], vec![]),
            Err(GraphError::EmptyPattern)
        );
        let err = Pattern::new(
            vec![l("A"), l("A"), l("A"), l("A")],
            vec![(0, 1, l("x")), (2, 3, l("x"))],
        );
        assert_eq!(err, Err(GraphError::Disconnected));
    }

    #[test]
    fn snapshot_invariants_enforced() {
        let n = vec![(1, l("A")), (2, l("A"))];
        assert_eq!(
            Snapshot::new(0, n.clone(), vec![(1, 1, l("x"))]).unwrap_err(),
            GraphError::SelfLoop(1)
        );
        assert_eq!(
            Snapshot::new(0, n.clone(), vec![(1, 3, l("x"))]).unwrap_err(),
            GraphError::MissingEndpoint(1, 3)
        );
        assert_eq!(
            Snapshot::new(0, n.clone(), vec![(1, 2, l("x")), (2, 1, l("x"))]).unwrap_err(),
            GraphError::DuplicateEdge(1, 2)
        );
        assert_eq!(
            Snapshot::new(0, vec![(1, l("A")), (1, l("B"))], vec![]).unwrap_err(),
            GraphError::DuplicateNode(1)
        );
    }

    #[test]
    fn labels_validated() {
        assert!(Label::new("").is_err());
        assert!(Label::new("a b").is_err());
        assert!(Label::new("a,b").is_err());
        assert!(Label::new(UNLABELED).is_ok());
    }

    #[test]
    fn code_round_trips() {
        let p = pat(&["A", "B", "C"], &[(0, 1, "x"), (1, 2, "y"), (2, 0, "z")]);
        let q = Pattern::from_code(p.code()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.nodes(), q.nodes());
        assert!(Pattern::from_code("(0,2,A,x,B)").is_err());
        assert!(Pattern::from_code("0,1,A,x,B").is_err());
        assert!(Pattern::from_code("(0,1,A,x,B)(1,0,B,x,A)").is_err());
    }

    #[test]
    fn one_edge_subpatterns_of_triangle() {
        let tri = pat(&["A", "A", "A"], &[(0, 1, "x"), (1, 2, "x"), (2, 0, "x")]);
        let subs = tri.one_edge_subpatterns();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].edge_count(), 2);
    }
}
