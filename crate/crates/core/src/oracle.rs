//! Exhaustive reference implementations for small inputs.
//!
//! Nothing here shares code with the matcher, the DFS-code canonicalizer,
//! the miner or the chain finder. Everything is exponential and guarded
//! by [`OracleLimits`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::detect::{GrowthRate, Sign};
use crate::graph::{Label, Pattern, Snapshot};
use crate::miner::{Frequency, FrequencyTable};
use crate::rational::Rational;
use crate::windowing::TimeWindow;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_pattern_edges: usize,
    pub max_snapshots: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 8,
            max_pattern_edges: 4,
            max_snapshots: 20,
        }
    }
}

impl OracleLimits {
    /// Rejects limits above the hard caps (8 nodes, 4 edges, 20 snapshots).
    pub fn new(
        max_nodes: usize,
        max_pattern_edges: usize,
        max_snapshots: usize,
    ) -> Result<Self, OracleError> {
        let caps = OracleLimits::default();
        if max_nodes > caps.max_nodes
            || max_pattern_edges > caps.max_pattern_edges
            || max_snapshots > caps.max_snapshots
        {
            return Err(OracleError::LimitExceeded("limits above hard caps".into()));
        }
        Ok(OracleLimits {
            max_nodes,
            max_pattern_edges,
            max_snapshots,
        })
    }
}

/// Small graph in plain form: node labels plus `(a, b, label)` edges.
#[derive(Debug, Clone)]
struct Plain {
    nodes: Vec<String>,
    edges: Vec<(usize, usize, String)>,
}

impl Plain {
    fn of_pattern(p: &Pattern) -> Self {
        Plain {
            nodes: p.nodes().iter().map(|l| l.to_string()).collect(),
            edges: p
                .edges()
                .iter()
                .map(|(a, b, l)| (*a, *b, l.to_string()))
                .collect(),
        }
    }

    fn edge_set(&self, perm: &[usize]) -> BTreeSet<(usize, usize, String)> {
        self.edges
            .iter()
            .map(|(a, b, l)| {
                let (x, y) = (perm[*a], perm[*b]);
                (x.min(y), x.max(y), l.clone())
            })
            .collect()
    }

    /// Lexicographically smallest relabeled form over all node orders.
    fn permutation_form(&self) -> Form {
        let n = self.nodes.len();
        let mut best: Option<Form> = None;
        for_each_permutation(n, &mut |perm| {
            // perm[i] = new position of node i
            let mut labels = vec![String::new(); n];
            for i in 0..n {
                labels[perm[i]] = self.nodes[i].clone();
            }
            let edges: Vec<_> = self.edge_set(perm).into_iter().collect();
            let form = (labels, edges);
            if best.as_ref().is_none_or(|b| form < *b) {
                best = Some(form);
            }
        });
        best.unwrap_or_default()
    }
}

fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, f: &mut dyn FnMut(&[usize])) {
        if perm.len() == n {
            f(perm);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                rec(perm, used, n, f);
                perm.pop();
                used[v] = false;
            }
        }
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], n, f);
}

/// True iff some node bijection carries `a` onto `b` with labels intact.
pub fn oracle_isomorphic(
    a: &Pattern,
    b: &Pattern,
    limits: &OracleLimits,
) -> Result<bool, OracleError> {
    for p in [a, b] {
        if p.nodes().len() > limits.max_nodes {
            return Err(OracleError::LimitExceeded(format!(
                "pattern with {} nodes",
                p.nodes().len()
            )));
        }
    }
    let (pa, pb) = (Plain::of_pattern(a), Plain::of_pattern(b));
    if pa.nodes.len() != pb.nodes.len() || pa.edges.len() != pb.edges.len() {
        return Ok(false);
    }
    let target = pb.edge_set(&(0..pb.nodes.len()).collect::<Vec<_>>());
    let mut found = false;
    for_each_permutation(pa.nodes.len(), &mut |perm| {
        if found {
            return;
        }
        let labels_ok = (0..perm.len()).all(|i| pa.nodes[i] == pb.nodes[perm[i]]);
        if labels_ok && pa.edge_set(perm) == target {
            found = true;
        }
    });
    Ok(found)
}

/// True iff some injective label-preserving node map carries every
/// pattern edge onto a snapshot edge with the same label.
pub fn oracle_is_subgraph(pattern: &Pattern, snapshot: &Snapshot) -> bool {
    let pn: Vec<&str> = pattern.nodes().iter().map(|l| l.as_str()).collect();
    let sn: Vec<(u64, &str)> = snapshot.nodes().map(|(id, l)| (id, l.as_str())).collect();
    let sedges: BTreeSet<(u64, u64, &str)> = snapshot
        .edges()
        .flat_map(|(a, b, l)| [(a, b, l.as_str()), (b, a, l.as_str())])
        .collect();
    fn rec(
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        pn: &[&str],
        sn: &[(u64, &str)],
        pattern: &Pattern,
        sedges: &BTreeSet<(u64, u64, &str)>,
    ) -> bool {
        if i == pn.len() {
            return pattern
                .edges()
                .iter()
                .all(|(a, b, l)| sedges.contains(&(sn[map[*a]].0, sn[map[*b]].0, l.as_str())));
        }
        for j in 0..sn.len() {
            if !used[j] && sn[j].1 == pn[i] {
                used[j] = true;
                map.push(j);
                if rec(i + 1, map, used, pn, sn, pattern, sedges) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    rec(
        0,
        &mut Vec::new(),
        &mut vec![false; sn.len()],
        &pn,
        &sn,
        pattern,
        &sedges,
    )
}

fn edge_subset_connected(edges: &[(usize, usize)], n: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut verts = BTreeSet::new();
    for &(a, b) in edges {
        verts.insert(a);
        verts.insert(b);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let roots: BTreeSet<usize> = verts.iter().map(|&v| find(&mut parent, v)).collect();
    roots.len() == 1
}

type Form = (Vec<String>, Vec<(usize, usize, String)>);

/// Permutation forms of all connected edge subsets of up to `max_edges`.
fn snapshot_forms(snapshot: &Snapshot, max_edges: usize) -> BTreeMap<Form, Plain> {
    let ids: Vec<u64> = snapshot.nodes().map(|(id, _)| id).collect();
    let labels: Vec<String> = snapshot.nodes().map(|(_, l)| l.to_string()).collect();
    let pos = |id: u64| ids.binary_search(&id).unwrap();
    let edges: Vec<(usize, usize, String)> = snapshot
        .edges()
        .map(|(a, b, l)| (pos(a), pos(b), l.to_string()))
        .collect();
    let mut forms = BTreeMap::new();
    let m = edges.len();
    // all subsets of size 1..=max_edges by index combinations
    fn combos(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            combos(m, k, i + 1, cur, out);
            cur.pop();
        }
    }
    for k in 1..=max_edges.min(m) {
        let mut subsets = Vec::new();
        combos(m, k, 0, &mut Vec::new(), &mut subsets);
        for subset in subsets {
            let pairs: Vec<(usize, usize)> =
                subset.iter().map(|&i| (edges[i].0, edges[i].1)).collect();
            if !edge_subset_connected(&pairs, labels.len()) {
                continue;
            }
            let verts: Vec<usize> = pairs
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let local = |v: usize| verts.binary_search(&v).unwrap();
            let plain = Plain {
                nodes: verts.iter().map(|&v| labels[v].clone()).collect(),
                edges: subset
                    .iter()
                    .map(|&i| (local(edges[i].0), local(edges[i].1), edges[i].2.clone()))
                    .collect(),
            };
            forms.entry(plain.permutation_form()).or_insert(plain);
        }
    }
    forms
}

/// Exhaustive frequent-pattern table: every connected edge subset of every
/// snapshot, grouped by brute-force canonical form, counted per snapshot,
/// filtered by `freq > alpha`.
pub fn oracle_mine(
    window: &TimeWindow,
    alpha: Rational,
    max_edges: usize,
    limits: &OracleLimits,
) -> Result<FrequencyTable, OracleError> {
    if window.len() > limits.max_snapshots {
        return Err(OracleError::LimitExceeded(format!(
            "{} snapshots",
            window.len()
        )));
    }
    if max_edges > limits.max_pattern_edges {
        return Err(OracleError::LimitExceeded(format!("max_edges {max_edges}")));
    }
    if let Some(g) = window
        .snapshots()
        .iter()
        .find(|g| g.node_count() > limits.max_nodes)
    {
        return Err(OracleError::LimitExceeded(format!(
            "snapshot with {} nodes",
            g.node_count()
        )));
    }
    let mut support: BTreeMap<Form, (Plain, u32)> = BTreeMap::new();
    for g in window.snapshots() {
        for (form, plain) in snapshot_forms(g, max_edges) {
            support.entry(form).or_insert((plain, 0)).1 += 1;
        }
    }
    let size = window.len() as u32;
    let mut table = FrequencyTable::new(window.window_id(), size);
    for (_, (plain, count)) in support {
        let f = Frequency::new(count, size);
        if !f.exceeds(&alpha) {
            continue;
        }
        let pattern = Pattern::new(
            plain
                .nodes
                .iter()
                .map(|s| Label::new(s).expect("labels came from a snapshot"))
                .collect(),
            plain
                .edges
                .iter()
                .map(|(a, b, l)| (*a, *b, Label::new(l).expect("labels came from a snapshot")))
                .collect(),
        )
        .expect("connected edge subset");
        table.insert(pattern, f);
    }
    Ok(table)
}

/// Brute-force periodic chain enumeration over a category sequence.
///
/// For every (period, start) it enumerates every admissible chain
/// (each step any same-category position after the previous one within
/// `jitter` of `start + k * period`, run until no step is possible), keeps
/// the longest, breaking ties by the smallest occurrence list, then drops
/// short chains and strict sub-chains within the same period and category.
pub fn oracle_periods(
    categories: &[String],
    period_max: usize,
    jitter: usize,
    min_repetitions: usize,
) -> Result<Vec<(usize, String, Vec<usize>)>, OracleError> {
    if categories.len() > 64 {
        return Err(OracleError::LimitExceeded(format!(
            "{} categories",
            categories.len()
        )));
    }
    let n = categories.len() as i64;
    let mut out = Vec::new();
    for period in 1..=period_max {
        let mut kept: Vec<(String, Vec<usize>)> = Vec::new();
        for start in 0..categories.len() {
            let cat = &categories[start];
            let mut best: Vec<usize> = vec![start];
            let mut stack = vec![vec![start]];
            while let Some(chain) = stack.pop() {
                let k = chain.len() as i64;
                let target = start as i64 + k * period as i64;
                let last = *chain.last().unwrap() as i64;
                let mut extended = false;
                for i in (target - jitter as i64)..=(target + jitter as i64) {
                    if i > last && i < n && categories[i as usize] == *cat {
                        let mut next = chain.clone();
                        next.push(i as usize);
                        stack.push(next);
                        extended = true;
                    }
                }
                if !extended
                    && (chain.len() > best.len() || (chain.len() == best.len() && chain < best))
                {
                    best = chain;
                }
            }
            if best.len() >= min_repetitions {
                kept.push((cat.clone(), best));
            }
        }
        for (cat, occ) in &kept {
            let set: BTreeSet<usize> = occ.iter().copied().collect();
            let dominated = kept.iter().any(|(c2, o2)| {
                c2 == cat && o2.len() > occ.len() && set.is_subset(&o2.iter().copied().collect())
            });
            if !dominated {
                out.push((period, cat.clone(), occ.clone()));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Strict trends via the growth-rate formulation: a step is increasing
/// when `GR(P, W_{i+1}, W_i) > 1` and decreasing when `GR(P, W_i, W_{i+1}) > 1`.
/// Returns `(first_window_pos, last_window_pos, sign)` of each maximal run.
pub fn oracle_strict_trends(freqs: &[Frequency]) -> Vec<(usize, usize, Sign)> {
    let one = Rational::from_integer(1);
    let mut out = Vec::new();
    for sign in [Sign::Increase, Sign::Decrease] {
        let steps: Vec<bool> = freqs
            .windows(2)
            .map(|w| {
                let gr = match sign {
                    Sign::Increase => GrowthRate::from_frequencies(w[1], w[0]),
                    Sign::Decrease => GrowthRate::from_frequencies(w[0], w[1]),
                };
                gr.exceeds(&one)
            })
            .collect();
        let mut start = None;
        for (i, &up) in steps.iter().chain([false].iter()).enumerate() {
            match (up, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    out.push((s, i, sign));
                    start = None;
                }
                _ => {}
            }
        }
    }
    out.sort();
    out
}
