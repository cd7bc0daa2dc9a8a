//! Report files: `windows.csv`, `patterns.csv`, `changes.jsonl`, `summary.txt`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::{EmergingChange, PeriodicChange, TrendChange};
use crate::error::{Error, Result};
use crate::graph::Pattern;
use crate::miner::{Frequency, FrequencyTable};
use crate::pipeline::{Detections, WindowInfo};
use crate::rational::{big_to_f64, format_big};

pub const WINDOWS_FILE: &str = "windows.csv";
pub const PATTERNS_FILE: &str = "patterns.csv";
pub const CHANGES_FILE: &str = "changes.jsonl";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRow {
    pub window_id: usize,
    pub start: usize,
    pub end: usize,
    pub size: usize,
    pub first_time: u64,
    pub last_time: u64,
    pub cut_reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRow {
    pub window_id: usize,
    pub code: String,
    pub support: u32,
    pub window_size: u32,
    pub frequent: bool,
}

/// One line of `changes.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChangeRecord {
    Emerging {
        pattern: String,
        windows: [usize; 2],
        growth_rate: String,
        growth_rate_f64: Option<f64>,
    },
    Trend {
        pattern: String,
        windows: Vec<usize>,
        sign: String,
        mode: String,
        lambda: Option<String>,
        lambda_f64: Option<f64>,
        global: bool,
    },
    Periodic {
        pattern: String,
        windows: Vec<[usize; 2]>,
        period: usize,
        category: String,
        occurrences: Vec<usize>,
        repetitions: usize,
        exact: bool,
        growth_rate: Option<String>,
    },
}

impl ChangeRecord {
    pub fn emerging(c: &EmergingChange) -> Self {
        ChangeRecord::Emerging {
            pattern: c.pattern.code().to_string(),
            windows: [c.from_window, c.to_window],
            growth_rate: c.growth_rate.to_string(),
            growth_rate_f64: c.growth_rate.to_f64().filter(|v| v.is_finite()),
        }
    }

    pub fn trend(c: &TrendChange) -> Self {
        ChangeRecord::Trend {
            pattern: c.pattern.code().to_string(),
            windows: c.window_span.clone(),
            sign: c.sign.to_string(),
            mode: c.mode.to_string(),
            lambda: c.lambda_value.as_ref().map(format_big),
            lambda_f64: c.lambda_value.as_ref().map(big_to_f64),
            global: c.is_global(),
        }
    }

    pub fn periodic(c: &PeriodicChange, window_ids: &[usize]) -> Self {
        ChangeRecord::Periodic {
            pattern: c.pattern.code().to_string(),
            windows: c
                .occurrence_indices
                .iter()
                .map(|&i| [window_ids[i], window_ids[i + 1]])
                .collect(),
            period: c.period,
            category: c.category.clone(),
            occurrences: c.occurrence_indices.clone(),
            repetitions: c.repetitions,
            exact: c.exact,
            growth_rate: c.growth_rate.map(|g| g.to_string()),
        }
    }
}

fn report_err(path: &Path, msg: impl ToString) -> Error {
    Error::Report {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn csv_bytes<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| report_err(path, e))?;
    }
    w.into_inner().map_err(|e| report_err(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| report_err(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| report_err(path, e))
}

pub fn write_windows(dir: &Path, windows: &[WindowInfo]) -> Result<()> {
    let path = dir.join(WINDOWS_FILE);
    let rows = windows.iter().map(|w| WindowRow {
        window_id: w.window_id,
        start: w.start,
        end: w.end,
        size: w.size,
        first_time: w.first_time,
        last_time: w.last_time,
        cut_reason: w.cut_reason.clone(),
    });
    write_file(&path, &csv_bytes(&path, rows)?)
}

/// Union-evaluated tables, one row per (window, pattern) in code order.
pub fn write_patterns(
    dir: &Path,
    tables: &[FrequencyTable],
    frequent: &[BTreeSet<String>],
) -> Result<()> {
    let path = dir.join(PATTERNS_FILE);
    let rows = tables.iter().zip(frequent).flat_map(|(t, fset)| {
        t.entries.iter().map(move |(code, e)| PatternRow {
            window_id: t.window_id,
            code: code.clone(),
            support: e.frequency.support,
            window_size: e.frequency.window_size,
            frequent: fset.contains(code),
        })
    });
    write_file(&path, &csv_bytes(&path, rows)?)
}

pub fn change_records(d: &Detections, window_ids: &[usize]) -> Vec<ChangeRecord> {
    let mut out: Vec<ChangeRecord> = d.emerging.iter().map(ChangeRecord::emerging).collect();
    out.extend(d.trends.iter().map(ChangeRecord::trend));
    out.extend(
        d.periodic
            .changes
            .iter()
            .map(|c| ChangeRecord::periodic(c, window_ids)),
    );
    out
}

pub fn write_changes(dir: &Path, records: &[ChangeRecord]) -> Result<()> {
    let path = dir.join(CHANGES_FILE);
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).map_err(|e| report_err(&path, e))?;
        buf.push(b'\n');
    }
    write_file(&path, &buf)
}

pub fn summary_text(windows: usize, patterns: usize, d: &Detections) -> String {
    let mut s = String::new();
    s.push_str(&format!("windows: {windows}\n"));
    s.push_str(&format!("patterns: {patterns}\n"));
    let count = |on: bool, n: usize| {
        if on {
            n.to_string()
        } else {
            "disabled".to_string()
        }
    };
    s.push_str(&format!(
        "emerging: {}\n",
        count(d.ran.emerging, d.emerging.len())
    ));
    let global = d.trends.iter().filter(|t| t.is_global()).count();
    if d.ran.trends {
        s.push_str(&format!("trends: {} (global: {global})\n", d.trends.len()));
    } else {
        s.push_str("trends: disabled\n");
    }
    s.push_str(&format!(
        "periodic: {}\n",
        count(d.ran.periodic, d.periodic.changes.len())
    ));
    if d.ran.periodic {
        s.push_str(&format!(
            "suppressed stable periodic chains: {}\n",
            d.periodic.suppressed_stable
        ));
    }
    for note in &d.notes {
        s.push_str(&format!("note: {note}\n"));
    }
    s
}

pub fn write_summary(dir: &Path, text: &str) -> Result<()> {
    write_file(&dir.join(SUMMARY_FILE), text.as_bytes())
}

pub fn read_windows(dir: &Path) -> Result<Vec<WindowRow>> {
    read_csv(&dir.join(WINDOWS_FILE))
}

/// Rebuilds union-evaluated tables and frequent sets from report files.
pub fn read_tables(dir: &Path) -> Result<(Vec<FrequencyTable>, Vec<BTreeSet<String>>)> {
    let windows = read_windows(dir)?;
    let path = dir.join(PATTERNS_FILE);
    let rows: Vec<PatternRow> = read_csv(&path)?;
    let mut tables: Vec<FrequencyTable> = windows
        .iter()
        .map(|w| FrequencyTable::new(w.window_id, w.size as u32))
        .collect();
    let mut frequent = vec![BTreeSet::new(); tables.len()];
    for (i, w) in windows.iter().enumerate() {
        if w.window_id != i {
            return Err(report_err(
                &dir.join(WINDOWS_FILE),
                "window ids must be 0, 1, 2, ...",
            ));
        }
        if w.size == 0 {
            return Err(report_err(
                &dir.join(WINDOWS_FILE),
                format!("window {i} is empty"),
            ));
        }
    }
    for row in rows {
        let Some(t) = tables.get_mut(row.window_id) else {
            return Err(report_err(
                &path,
                format!("unknown window {}", row.window_id),
            ));
        };
        if row.window_size != t.window_size || row.support > row.window_size {
            return Err(report_err(&path, format!("bad frequency for {}", row.code)));
        }
        let pattern = Pattern::from_code(&row.code).map_err(|e| report_err(&path, e))?;
        if pattern.code() != row.code {
            return Err(report_err(
                &path,
                format!("non-canonical code {}", row.code),
            ));
        }
        if row.frequent {
            frequent[row.window_id].insert(row.code.clone());
        }
        t.insert(pattern, Frequency::new(row.support, row.window_size));
    }
    Ok((tables, frequent))
}
