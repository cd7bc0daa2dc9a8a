mod common;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use evomine::report::ChangeRecord;
use evomine::stream::{parse_stream, write_stream};
use evomine::{Rational, Snapshot};
use tempfile::TempDir;

const REPORTS: [&str; 4] = [
    "windows.csv",
    "patterns.csv",
    "changes.jsonl",
    "summary.txt",
];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_evomine"))
}

fn write_fixture(dir: &Path, snaps: &[Snapshot]) -> PathBuf {
    let path = dir.join("stream.tsv");
    let mut buf = Vec::new();
    write_stream(snaps, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn base_edge(time: u64, planted: bool) -> Snapshot {
    let mut nodes = vec![(0, "A"), (1, "B")];
    let mut edges = vec![(0, 1, "x")];
    if planted {
        nodes.extend([(2, "C"), (3, "D")]);
        edges.push((2, 3, "y"));
    }
    snapshot(time, &nodes, &edges)
}

fn changes(dir: &Path) -> Vec<ChangeRecord> {
    fs::read_to_string(dir.join("changes.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn stream_round_trip() {
    let mut r = rng(5);
    let snaps: Vec<Snapshot> = (0..12u64)
        .map(|t| random_snapshot(&mut r, t * 3, 7, 6, 3, 2))
        .collect();
    let mut first = Vec::new();
    write_stream(&snaps, &mut first).unwrap();
    let reparsed = parse_stream(first.as_slice()).unwrap();
    let mut second = Vec::new();
    write_stream(&reparsed, &mut second).unwrap();
    assert_eq!(first, second);
    assert_eq!(reparsed.len(), snaps.len());
    for (a, b) in snaps.iter().zip(&reparsed) {
        assert_eq!(a.time_index(), b.time_index());
        assert!(a.nodes().eq(b.nodes()));
        assert!(a.edges().eq(b.edges()));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let mut r = rng(8);
    let snaps: Vec<Snapshot> = (0..30u64)
        .map(|t| random_snapshot(&mut r, t, 8, 10, 2, 2))
        .collect();
    let stream = write_fixture(tmp.path(), &snaps);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let (code, err) = run(&[
            "run",
            stream.to_str().unwrap(),
            "--window-size",
            "6",
            "--alpha",
            "0.3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    for f in REPORTS {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let stream = write_fixture(tmp.path(), &[base_edge(0, false)]);
    let s = stream.to_str().unwrap();
    let out = tmp.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["run", s, "--alpha", "1.5", "--out", o]).0, 1);
    assert_eq!(run(&["run", s, "--beta", "1", "--out", o]).0, 1);
    assert_eq!(run(&["run", s, "--no-such-flag"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);

    let bad = tmp.path().join("bad.tsv");
    fs::write(&bad, "# evomine-stream v1\n0\tA\n").unwrap();
    assert_eq!(run(&["run", bad.to_str().unwrap(), "--out", o]).0, 2);
    assert_eq!(
        run(&[
            "run",
            tmp.path().join("missing").to_str().unwrap(),
            "--out",
            o
        ])
        .0,
        2
    );
    assert_eq!(
        run(&[
            "detect",
            "--input",
            tmp.path().join("nothing").to_str().unwrap(),
            "--out",
            o
        ])
        .0,
        2
    );
    assert_eq!(run(&["run", s, "--out", o]).0, 0);
}

#[test]
fn config_file_and_flag_override() {
    let tmp = TempDir::new().unwrap();
    let snaps: Vec<Snapshot> = (0..12).map(|t| base_edge(t, false)).collect();
    let stream = write_fixture(tmp.path(), &snaps);
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# fixed windows\nwindow-size=3\nalpha=1/2\n").unwrap();
    let out = tmp.path().join("o");
    let args = [
        "partition",
        stream.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).0, 0);
    assert_eq!(evomine::report::read_windows(&out).unwrap().len(), 4);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--window-size", "4"]);
    assert_eq!(run(&with_flag).0, 0);
    assert_eq!(evomine::report::read_windows(&out).unwrap().len(), 3);
}

#[test]
fn drift_free_stream_reports_nothing() {
    let tmp = TempDir::new().unwrap();
    let snaps: Vec<Snapshot> = (0..20).map(|t| base_edge(t, false)).collect();
    let stream = write_fixture(tmp.path(), &snaps);
    let out = tmp.path().join("o");
    let (code, err) = run(&[
        "run",
        stream.to_str().unwrap(),
        "--window-size",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fs::read_to_string(out.join("changes.jsonl")).unwrap(), "");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("windows: 4\n"), "{summary}");
    assert!(
        summary.contains("suppressed stable periodic chains: 1\n"),
        "{summary}"
    );
}

#[test]
fn planted_emerging_pattern_via_mine_then_detect() {
    let tmp = TempDir::new().unwrap();
    let snaps: Vec<Snapshot> = (0..20u64)
        .map(|t| {
            let planted = if t < 10 { t == 3 } else { t != 14 };
            base_edge(t, planted)
        })
        .collect();
    let stream = write_fixture(tmp.path(), &snaps);
    let mined = tmp.path().join("mined");
    let detected = tmp.path().join("detected");
    let (code, err) = run(&[
        "mine",
        stream.to_str().unwrap(),
        "--window-size",
        "10",
        "--out",
        mined.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, err) = run(&[
        "detect",
        "--input",
        mined.to_str().unwrap(),
        "--beta",
        "3",
        "--detectors",
        "emerging",
        "--out",
        detected.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let recs = changes(&detected);
    assert_eq!(recs.len(), 1, "{recs:?}");
    match &recs[0] {
        ChangeRecord::Emerging {
            pattern,
            windows,
            growth_rate,
            ..
        } => {
            assert_eq!(pattern, "(0,1,C,y,D)");
            assert_eq!(*windows, [0, 1]);
            assert_eq!(growth_rate, "9");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn reported_changes_agree_with_pattern_table() {
    let tmp = TempDir::new().unwrap();
    let mut r = rng(21);
    // window-dependent edge density so emerging changes actually appear
    let snaps: Vec<Snapshot> = (0..40u64)
        .map(|t| random_snapshot(&mut r, t, 7, 2 + (t as usize / 8) * 2, 2, 2))
        .collect();
    let stream = write_fixture(tmp.path(), &snaps);
    let out = tmp.path().join("o");
    let (code, err) = run(&[
        "run",
        stream.to_str().unwrap(),
        "--window-size",
        "8",
        "--alpha",
        "0.25",
        "--beta",
        "3/2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");

    let mut rdr = csv::Reader::from_path(out.join("patterns.csv")).unwrap();
    let mut freq: HashMap<(usize, String), (u64, u64)> = HashMap::new();
    for row in rdr.records() {
        let row = row.unwrap();
        freq.insert(
            (row[0].parse().unwrap(), row[1].to_string()),
            (row[2].parse().unwrap(), row[3].parse().unwrap()),
        );
    }
    let recs = changes(&out);
    let emerging: Vec<_> = recs
        .iter()
        .filter_map(|c| match c {
            ChangeRecord::Emerging {
                pattern,
                windows,
                growth_rate,
                ..
            } => Some((pattern, windows, growth_rate)),
            _ => None,
        })
        .collect();
    assert!(!emerging.is_empty());
    let beta = Rational::new(3, 2);
    for (pattern, windows, gr) in emerging {
        let (s0, n0) = freq[&(windows[0], pattern.clone())];
        let (s1, n1) = freq[&(windows[1], pattern.clone())];
        if s0 == 0 {
            assert_eq!(gr, "inf");
        } else {
            let expect = Rational::new(s1 * n0, n1 * s0);
            assert!(expect > beta);
            assert_eq!(*gr, evomine::rational::format_ratio(&expect));
        }
    }
}
