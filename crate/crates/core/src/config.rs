//! Run configuration from `key=value` files and command-line overrides.
//!
//! Keys match the long CLI flag names without dashes, e.g.
//! `window-size=20` or `theta-bins=down<1/2,flat<=2,up<=inf`.

use std::fs;
use std::path::{Path, PathBuf};

use crate::detect::{DetectConfig, ThetaBins};
use crate::error::{Error, Result};
use crate::miner::MiningConfig;
use crate::rational::{parse_rational, Rational};
use crate::windowing::{PartitionConfig, PartitionMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detectors {
    pub emerging: bool,
    pub trends: bool,
    pub periodic: bool,
}

impl Default for Detectors {
    fn default() -> Self {
        Detectors {
            emerging: true,
            trends: true,
            periodic: true,
        }
    }
}

impl Detectors {
    fn parse(s: &str) -> Result<Self> {
        let mut d = Detectors {
            emerging: false,
            trends: false,
            periodic: false,
        };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "emerging" => d.emerging = true,
                "trends" => d.trends = true,
                "periodic" => d.periodic = true,
                "all" => d = Detectors::default(),
                other => return Err(Error::Config(format!("unknown detector {other:?}"))),
            }
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub partition: PartitionConfig,
    pub mining: MiningConfig,
    pub detect: DetectConfig,
    pub detectors: Detectors,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            partition: PartitionConfig::default(),
            mining: MiningConfig {
                alpha: Rational::new(1, 2),
                max_edges: 3,
            },
            detect: DetectConfig::default(),
            detectors: Detectors::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a nonnegative integer, got {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" | "" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true or false, got {v:?}"
        ))),
    }
}

fn parse_ratio(key: &str, v: &str) -> Result<Rational> {
    parse_rational(v).map_err(|e| Error::Config(format!("{key}: {e}")))
}

/// Builds a validated config by applying `(key, value)` settings in order
/// over the defaults. Later settings win.
pub fn from_settings<'a>(
    settings: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<RunConfig> {
    let mut c = RunConfig::default();
    let mut bins: Option<ThetaBins> = None;
    for (key, v) in settings {
        match key {
            "window-size" => c.partition.fixed_size = parse_usize(key, v)?,
            "adaptive" => {
                c.partition.mode = if parse_bool(key, v)? {
                    PartitionMode::Adaptive
                } else {
                    PartitionMode::Fixed
                }
            }
            "tau" => {
                c.partition.divergence_threshold = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("tau: expected a real, got {v:?}")))?
            }
            "min-window" => c.partition.min_window = parse_usize(key, v)?,
            "max-window" => c.partition.max_window = parse_usize(key, v)?,
            "alpha" => c.mining.alpha = parse_ratio(key, v)?,
            "max-edges" => c.mining.max_edges = parse_usize(key, v)?,
            "beta" => c.detect.beta = parse_ratio(key, v)?,
            "trend-mode" => c.detect.trend_mode = v.trim().parse()?,
            "trend-epsilon" => c.detect.trend_epsilon = parse_ratio(key, v)?,
            "period-max" => c.detect.period_max = parse_usize(key, v)?,
            "jitter" => c.detect.jitter = parse_usize(key, v)?,
            "min-repetitions" => c.detect.min_repetitions = parse_usize(key, v)?,
            "theta-bins" => bins = Some(v.trim().parse()?),
            "include-stable" => c.detect.include_stable = parse_bool(key, v)?,
            "detectors" => c.detectors = Detectors::parse(v)?,
            "out" => c.output_dir = PathBuf::from(v.trim()),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
    }
    c.detect.theta_bins = bins.unwrap_or_else(|| ThetaBins::around(c.detect.beta));
    c.partition.validate()?;
    c.mining.validate()?;
    c.detect.validate()?;
    Ok(c)
}

/// Reads `key=value` lines; blank lines and `#` comments are ignored.
pub fn read_settings(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected key=value",
                path.display(),
                i + 1
            )));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
