//! End-to-end orchestration: partition, mine, union-evaluate, detect, report.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{Detectors, RunConfig};
use crate::detect::{self, EmergingChange, PeriodicDetection, TrendChange};
use crate::error::{Error, Result};
use crate::graph::{Pattern, Snapshot};
use crate::miner::{self, FrequencyTable, MiningConfig};
use crate::report;
use crate::stream;
use crate::windowing::{self, TimeWindow};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowInfo {
    pub window_id: usize,
    pub start: usize,
    /// Inclusive stream position of the last snapshot.
    pub end: usize,
    pub size: usize,
    pub first_time: u64,
    pub last_time: u64,
    pub cut_reason: String,
}

impl WindowInfo {
    pub fn of(w: &TimeWindow) -> Self {
        WindowInfo {
            window_id: w.window_id(),
            start: w.start_index(),
            end: w.end_index() - 1,
            size: w.len(),
            first_time: w.snapshots()[0].time_index(),
            last_time: w.snapshots()[w.len() - 1].time_index(),
            cut_reason: w.cut_reason().to_string(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Detections {
    pub emerging: Vec<EmergingChange>,
    pub trends: Vec<TrendChange>,
    pub periodic: PeriodicDetection,
    /// Which detectors actually ran.
    pub ran: Detectors,
    pub notes: Vec<String>,
}

/// Mined frequent tables, one per window, mined in parallel.
pub fn mine_windows(windows: &[TimeWindow], config: &MiningConfig) -> Result<Vec<FrequencyTable>> {
    let tables = windows
        .par_iter()
        .map(|w| miner::mine_frequent(w, config))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    for t in &tables {
        if let Some(e) = t
            .entries
            .values()
            .find(|e| !e.frequency.exceeds(&config.alpha))
        {
            return Err(Error::Invariant(format!(
                "mined pattern {} in window {} is not above alpha",
                e.pattern, t.window_id
            )));
        }
    }
    Ok(tables)
}

/// Extends every mined table with the frequency of every pattern frequent
/// in any window. Returns the completed tables and each window's frequent set.
pub fn union_evaluate(
    windows: &[TimeWindow],
    mined: Vec<FrequencyTable>,
) -> (Vec<FrequencyTable>, Vec<BTreeSet<String>>) {
    let mut universe: Vec<Pattern> = mined.iter().flat_map(|t| t.patterns().cloned()).collect();
    universe.sort();
    universe.dedup();
    let frequent: Vec<BTreeSet<String>> = mined
        .iter()
        .map(|t| t.codes().map(str::to_string).collect())
        .collect();
    let tables = windows
        .iter()
        .zip(mined)
        .map(|(w, mut table)| {
            let missing = universe.iter().filter(|p| table.get(p.code()).is_none());
            let extra = miner::evaluate_patterns(missing, w);
            table.entries.extend(extra.entries);
            table
        })
        .collect();
    (tables, frequent)
}

/// Runs the enabled detectors over union-evaluated tables.
///
/// Emerging changes for a window pair consider only patterns frequent in
/// at least one of the two windows. Trend and periodic detection use the
/// whole union and are skipped, with a note, when there are too few windows.
pub fn detect_all(
    tables: &[FrequencyTable],
    frequent: &[BTreeSet<String>],
    config: &RunConfig,
) -> Result<Detections> {
    let mut d = Detections {
        ran: config.detectors,
        ..Default::default()
    };
    let dc = &config.detect;
    if config.detectors.emerging {
        for i in 1..tables.len() {
            let codes: BTreeSet<&str> = frequent[i - 1]
                .iter()
                .chain(&frequent[i])
                .map(String::as_str)
                .collect();
            let earlier = tables[i - 1].restrict(codes.iter().copied());
            let later = tables[i].restrict(codes.iter().copied());
            d.emerging
                .extend(detect::detect_emerging(&earlier, &later, dc)?);
        }
    }
    if config.detectors.trends {
        if tables.len() >= 2 {
            d.trends = detect::detect_trends(tables, dc)?;
        } else {
            d.ran.trends = false;
            d.notes
                .push("trend detection skipped: fewer than 2 windows".into());
        }
    }
    if config.detectors.periodic {
        if tables.len() >= 3 {
            d.periodic = detect::detect_periodic(tables, dc)?;
        } else {
            d.ran.periodic = false;
            d.notes
                .push("periodic detection skipped: fewer than 3 windows".into());
        }
    }
    Ok(d)
}

/// Everything the pipeline computes before writing reports.
pub struct Analysis {
    pub windows: Vec<WindowInfo>,
    pub tables: Vec<FrequencyTable>,
    pub frequent: Vec<BTreeSet<String>>,
    pub detections: Detections,
}

pub fn analyze(stream: &[Snapshot], config: &RunConfig) -> Result<Analysis> {
    let windows = windowing::partition(stream, &config.partition)?;
    let mined = mine_windows(&windows, &config.mining)?;
    let (tables, frequent) = union_evaluate(&windows, mined);
    let detections = detect_all(&tables, &frequent, config)?;
    Ok(Analysis {
        windows: windows.iter().map(WindowInfo::of).collect(),
        tables,
        frequent,
        detections,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

pub fn write_detections(dir: &Path, tables: &[FrequencyTable], d: &Detections) -> Result<()> {
    let ids: Vec<usize> = tables.iter().map(|t| t.window_id).collect();
    let patterns: BTreeSet<&str> = tables.iter().flat_map(|t| t.codes()).collect();
    report::write_changes(dir, &report::change_records(d, &ids))?;
    report::write_summary(dir, &report::summary_text(tables.len(), patterns.len(), d))
}

/// `partition`: writes `windows.csv`.
pub fn run_partition(config: &RunConfig, stream_path: &Path) -> Result<Vec<WindowInfo>> {
    let stream = stream::load_stream(stream_path)?;
    let windows = windowing::partition(&stream, &config.partition)?;
    let info: Vec<WindowInfo> = windows.iter().map(WindowInfo::of).collect();
    ensure_dir(&config.output_dir)?;
    report::write_windows(&config.output_dir, &info)?;
    Ok(info)
}

/// `mine`: writes `windows.csv` and the union-evaluated `patterns.csv`.
pub fn run_mine(config: &RunConfig, stream_path: &Path) -> Result<()> {
    let stream = stream::load_stream(stream_path)?;
    let windows = windowing::partition(&stream, &config.partition)?;
    let mined = mine_windows(&windows, &config.mining)?;
    let (tables, frequent) = union_evaluate(&windows, mined);
    let info: Vec<WindowInfo> = windows.iter().map(WindowInfo::of).collect();
    ensure_dir(&config.output_dir)?;
    report::write_windows(&config.output_dir, &info)?;
    report::write_patterns(&config.output_dir, &tables, &frequent)
}

/// `detect`: reads `windows.csv` and `patterns.csv` from `input_dir`,
/// writes `changes.jsonl` and `summary.txt` to the output directory.
pub fn run_detect(config: &RunConfig, input_dir: &Path) -> Result<Detections> {
    let (tables, frequent) = report::read_tables(input_dir)?;
    let d = detect_all(&tables, &frequent, config)?;
    ensure_dir(&config.output_dir)?;
    write_detections(&config.output_dir, &tables, &d)?;
    Ok(d)
}

/// Writes all four report files for a finished analysis.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<()> {
    ensure_dir(dir)?;
    report::write_windows(dir, &analysis.windows)?;
    report::write_patterns(dir, &analysis.tables, &analysis.frequent)?;
    write_detections(dir, &analysis.tables, &analysis.detections)
}

/// `run`: the full pipeline, writing all four report files.
pub fn run_pipeline(config: &RunConfig, stream_path: &Path) -> Result<Analysis> {
    let stream = stream::load_stream(stream_path)?;
    let analysis = analyze(&stream, config)?;
    write_analysis(&config.output_dir, &analysis)?;
    Ok(analysis)
}
