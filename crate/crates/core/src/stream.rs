//! Tab-separated snapshot stream files.
//!
//! ```text
//! # evomine-stream v1
//! <time>\t<node-a>\t<label-a>\t<node-b>\t<label-b>\t<edge-label>
//! ```
//!
//! Records are sorted by time; all records sharing a time index form one
//! snapshot. A record whose `node-b`, `label-b` and `edge-label` are all
//! `-` declares an isolated node. Timestamps are grouped by exact equality,
//! so irregular raw timestamps must be binned before writing the file.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{GraphError, Label, Snapshot};

pub const STREAM_HEADER: &str = "# evomine-stream v1";
const SENTINEL: &str = "-";

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("stream file is empty")]
    Empty,
    #[error("line 1: expected header {STREAM_HEADER:?}")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: time index {time} goes backwards")]
    Unsorted { line: usize, time: u64 },
    #[error("line {line}: node {node} relabeled from {old} to {new} within one snapshot")]
    LabelConflict {
        line: usize,
        node: u64,
        old: String,
        new: String,
    },
    #[error("line {line}: duplicate edge between {a} and {b}")]
    DuplicateEdge { line: usize, a: u64, b: u64 },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

#[derive(Default)]
struct Interner(HashMap<String, Label>);

impl Interner {
    fn get(&mut self, s: &str, line: usize) -> Result<Label, StreamError> {
        if let Some(l) = self.0.get(s) {
            return Ok(l.clone());
        }
        let l = Label::new(s).map_err(|source| StreamError::Graph { line, source })?;
        self.0.insert(s.to_string(), l.clone());
        Ok(l)
    }
}

#[derive(Default)]
struct Pending {
    time: u64,
    first_line: usize,
    nodes: BTreeMap<u64, Label>,
    edges: Vec<(u64, u64, Label)>,
    pairs: BTreeSet<(u64, u64)>,
}

impl Pending {
    fn add_node(&mut self, id: u64, label: Label, line: usize) -> Result<(), StreamError> {
        match self.nodes.get(&id) {
            Some(old) if *old != label => Err(StreamError::LabelConflict {
                line,
                node: id,
                old: old.to_string(),
                new: label.to_string(),
            }),
            Some(_) => Ok(()),
            None => {
                self.nodes.insert(id, label);
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<Snapshot, StreamError> {
        let line = self.first_line;
        Snapshot::new(self.time, self.nodes.into_iter().collect(), self.edges)
            .map_err(|source| StreamError::Graph { line, source })
    }
}

/// Parses a stream from any reader.
pub fn parse_stream(reader: impl BufRead) -> Result<Vec<Snapshot>, StreamError> {
    let mut lines = reader.lines().enumerate();
    let io_err = |source| StreamError::Io {
        path: "<stream>".into(),
        source,
    };
    match lines.next() {
        None => return Err(StreamError::Empty),
        Some((_, l)) => {
            if l.map_err(io_err)?.trim_end() != STREAM_HEADER {
                return Err(StreamError::MissingHeader);
            }
        }
    }
    let mut interner = Interner::default();
    let mut out = Vec::new();
    let mut pending: Option<Pending> = None;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(io_err)?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let malformed = |msg: &str| StreamError::Malformed {
            line: lineno,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(malformed(&format!(
                "expected 6 tab-separated fields, found {}",
                f.len()
            )));
        }
        let time: u64 = f[0].parse().map_err(|_| malformed("bad time index"))?;
        let a: u64 = f[1].parse().map_err(|_| malformed("bad node id"))?;
        let la = interner.get(f[2], lineno)?;

        match pending.as_ref().map(|p| p.time) {
            Some(t) if t == time => {}
            Some(t) if time < t => return Err(StreamError::Unsorted { line: lineno, time }),
            prev => {
                if prev.is_some() {
                    out.push(pending.take().unwrap().finish()?);
                }
                pending = Some(Pending {
                    time,
                    first_line: lineno,
                    ..Default::default()
                });
            }
        }
        let snap = pending.as_mut().unwrap();
        snap.add_node(a, la, lineno)?;

        if f[3] == SENTINEL {
            if f[4] != SENTINEL || f[5] != SENTINEL {
                return Err(malformed(
                    "isolated-node record must have '-' in the last three fields",
                ));
            }
            continue;
        }
        let b: u64 = f[3].parse().map_err(|_| malformed("bad node id"))?;
        let lb = interner.get(f[4], lineno)?;
        let el = interner.get(f[5], lineno)?;
        if a == b {
            return Err(StreamError::Graph {
                line: lineno,
                source: GraphError::SelfLoop(a),
            });
        }
        snap.add_node(b, lb, lineno)?;
        if !snap.pairs.insert((a.min(b), a.max(b))) {
            return Err(StreamError::DuplicateEdge {
                line: lineno,
                a: a.min(b),
                b: a.max(b),
            });
        }
        snap.edges.push((a, b, el));
    }
    match pending {
        Some(p) => out.push(p.finish()?),
        None => return Err(StreamError::Empty),
    }
    Ok(out)
}

/// One snapshot per distinct time index, in increasing order.
pub fn load_stream(path: &Path) -> Result<Vec<Snapshot>, StreamError> {
    let file = File::open(path).map_err(|source| StreamError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_stream(BufReader::new(file))
}

/// Writes snapshots in normalized form: per snapshot, edges with the
/// smaller node id first in sorted order, then isolated nodes by id.
/// Snapshots without nodes cannot be represented and are skipped.
pub fn write_stream(snapshots: &[Snapshot], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{STREAM_HEADER}")?;
    for s in snapshots {
        let t = s.time_index();
        let labels: BTreeMap<u64, &Label> = s.nodes().collect();
        let mut touched = BTreeSet::new();
        for (a, b, l) in s.edges() {
            touched.insert(a);
            touched.insert(b);
            writeln!(w, "{t}\t{a}\t{}\t{b}\t{}\t{l}", labels[&a], labels[&b])?;
        }
        for (id, l) in &labels {
            if !touched.contains(id) {
                writeln!(w, "{t}\t{id}\t{l}\t-\t-\t-")?;
            }
        }
    }
    Ok(())
}
