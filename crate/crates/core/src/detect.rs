//! Classification of pattern-frequency dynamics across consecutive windows:
//! emerging changes (growth rate above a threshold), trend changes
//! (monotone runs, or the last window against the mean of the earlier
//! ones) and periodic changes (the same growth-rate category recurring
//! every `period` window pairs).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::graph::Pattern;
use crate::miner::{frequency, Frequency, FrequencyTable};
use crate::rational::{format_ratio, parse_rational, ratio_to_f64, to_big, Rational};
use crate::windowing::TimeWindow;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error("invalid detect config: {0}")]
    InvalidConfig(String),
    #[error("windows {earlier} and {later} are not consecutive")]
    NonConsecutive { earlier: usize, later: usize },
    #[error("pattern {code} has no frequency in window {window}; tables must be union-evaluated")]
    NotUnionEvaluated { code: String, window: usize },
    #[error("need at least {need} tables, got {got}")]
    TooFewTables { need: usize, got: usize },
    #[error("growth rate 0/0 has no category")]
    UndefinedGrowthRate,
}

/// `freq(P, numerator) / freq(P, denominator)` on the extended range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthRate {
    Finite(Rational),
    Infinite,
    /// Both frequencies are zero.
    Undefined,
}

impl GrowthRate {
    pub fn from_frequencies(numerator: Frequency, denominator: Frequency) -> Self {
        match (numerator.is_zero(), denominator.is_zero()) {
            (true, true) => GrowthRate::Undefined,
            (false, true) => GrowthRate::Infinite,
            _ => GrowthRate::Finite(Rational::new(
                numerator.support as u64 * denominator.window_size as u64,
                numerator.window_size as u64 * denominator.support as u64,
            )),
        }
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, GrowthRate::Undefined)
    }

    /// Strictly greater than a finite threshold. `Undefined` never is.
    pub fn exceeds(&self, threshold: &Rational) -> bool {
        match self {
            GrowthRate::Finite(r) => r > threshold,
            GrowthRate::Infinite => true,
            GrowthRate::Undefined => false,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            GrowthRate::Finite(r) => Some(ratio_to_f64(r)),
            GrowthRate::Infinite => Some(f64::INFINITY),
            GrowthRate::Undefined => None,
        }
    }

    /// Order on defined values, with infinity on top.
    fn defined_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GrowthRate::Finite(a), GrowthRate::Finite(b)) => a.cmp(b),
            (GrowthRate::Infinite, GrowthRate::Infinite) => Ordering::Equal,
            (GrowthRate::Infinite, _) => Ordering::Greater,
            (_, GrowthRate::Infinite) => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Display for GrowthRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthRate::Finite(r) => f.write_str(&format_ratio(r)),
            GrowthRate::Infinite => f.write_str("inf"),
            GrowthRate::Undefined => f.write_str("undefined"),
        }
    }
}

/// Growth rate of `pattern` between two windows, counted directly.
pub fn growth_rate(
    pattern: &Pattern,
    numerator_window: &TimeWindow,
    denominator_window: &TimeWindow,
) -> GrowthRate {
    GrowthRate::from_frequencies(
        frequency(pattern, numerator_window),
        frequency(pattern, denominator_window),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Finite(Rational),
    Infinite,
}

/// One bin of the growth-rate categorization: values up to `upper`
/// (inclusive or exclusive) map to `category`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaBin {
    pub upper: Bound,
    pub inclusive: bool,
    pub category: String,
}

impl ThetaBin {
    fn admits(&self, gr: &GrowthRate) -> bool {
        match (self.upper, gr) {
            (Bound::Infinite, _) => true,
            (Bound::Finite(_), GrowthRate::Infinite) => false,
            (Bound::Finite(u), GrowthRate::Finite(g)) => *g < u || (self.inclusive && *g == u),
            (_, GrowthRate::Undefined) => false,
        }
    }
}

/// Ordered bins covering `[0, +inf]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaBins(pub Vec<ThetaBin>);

impl ThetaBins {
    /// `[0, 1/beta)` shrinking, `[1/beta, beta]` stable, `(beta, inf]` growing.
    pub fn around(beta: Rational) -> Self {
        ThetaBins(vec![
            ThetaBin {
                upper: Bound::Finite(beta.recip()),
                inclusive: false,
                category: "shrinking".into(),
            },
            ThetaBin {
                upper: Bound::Finite(beta),
                inclusive: true,
                category: "stable".into(),
            },
            ThetaBin {
                upper: Bound::Infinite,
                inclusive: true,
                category: "growing".into(),
            },
        ])
    }

    pub fn validate(&self) -> Result<(), DetectError> {
        let bad = |m: &str| Err(DetectError::InvalidConfig(format!("theta bins: {m}")));
        let Some(last) = self.0.last() else {
            return bad("no bins");
        };
        if last.upper != Bound::Infinite {
            return bad("last bound must be inf");
        }
        let mut prev: Option<Rational> = None;
        for b in &self.0[..self.0.len() - 1] {
            let Bound::Finite(u) = b.upper else {
                return bad("only the last bound may be inf");
            };
            if prev.is_some_and(|p| p >= u) {
                return bad("bounds must strictly increase");
            }
            prev = Some(u);
        }
        let cats: BTreeSet<&str> = self.0.iter().map(|b| b.category.as_str()).collect();
        if cats.len() != self.0.len() {
            return bad("categories must be distinct");
        }
        Ok(())
    }

    fn lookup(&self, gr: &GrowthRate) -> Option<&str> {
        self.0
            .iter()
            .find(|b| b.admits(gr))
            .map(|b| b.category.as_str())
    }
}

/// Text form: `name<bound` (exclusive) or `name<=bound` (inclusive),
/// comma separated, e.g. `shrinking<1/2,stable<=2,growing<=inf`.
impl FromStr for ThetaBins {
    type Err = DetectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: String| DetectError::InvalidConfig(format!("theta bins: {m}"));
        let mut bins = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (cat, rest, inclusive) = if let Some((c, r)) = part.split_once("<=") {
                (c, r, true)
            } else if let Some((c, r)) = part.split_once('<') {
                (c, r, false)
            } else {
                return Err(bad(format!(
                    "expected name<bound or name<=bound, got {part:?}"
                )));
            };
            let upper = if rest.trim() == "inf" {
                Bound::Infinite
            } else {
                Bound::Finite(parse_rational(rest).map_err(|e| bad(e.to_string()))?)
            };
            if cat.trim().is_empty() {
                return Err(bad(format!("empty category in {part:?}")));
            }
            bins.push(ThetaBin {
                upper,
                inclusive,
                category: cat.trim().to_string(),
            });
        }
        let bins = ThetaBins(bins);
        bins.validate()?;
        Ok(bins)
    }
}

impl fmt::Display for ThetaBins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let op = if b.inclusive { "<=" } else { "<" };
            match b.upper {
                Bound::Finite(u) => write!(f, "{}{}{}", b.category, op, format_ratio(&u))?,
                Bound::Infinite => write!(f, "{}{}inf", b.category, op)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendMode {
    Strict,
    Lambda,
}

impl FromStr for TrendMode {
    type Err = DetectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(TrendMode::Strict),
            "lambda" => Ok(TrendMode::Lambda),
            _ => Err(DetectError::InvalidConfig(format!(
                "unknown trend mode {s:?}"
            ))),
        }
    }
}

impl fmt::Display for TrendMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendMode::Strict => "strict",
            TrendMode::Lambda => "lambda",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectConfig {
    pub beta: Rational,
    pub trend_mode: TrendMode,
    pub trend_epsilon: Rational,
    pub period_max: usize,
    pub jitter: usize,
    pub min_repetitions: usize,
    pub theta_bins: ThetaBins,
    /// Report periodic chains in the category that holds growth rate 1.
    pub include_stable: bool,
}

impl DetectConfig {
    pub fn with_beta(beta: Rational) -> Self {
        DetectConfig {
            beta,
            trend_mode: TrendMode::Strict,
            trend_epsilon: Rational::from_integer(0),
            period_max: 6,
            jitter: 0,
            min_repetitions: 3,
            theta_bins: ThetaBins::around(beta),
            include_stable: false,
        }
    }

    pub fn validate(&self) -> Result<(), DetectError> {
        let bad = |m: &str| Err(DetectError::InvalidConfig(m.to_string()));
        if self.beta <= Rational::from_integer(1) {
            return bad("beta must be > 1");
        }
        if self.period_max < 1 {
            return bad("period_max must be >= 1");
        }
        if self.min_repetitions < 2 {
            return bad("min_repetitions must be >= 2");
        }
        self.theta_bins.validate()
    }

    /// Category holding growth rate 1.
    pub fn stable_category(&self) -> &str {
        self.theta_bins
            .lookup(&GrowthRate::Finite(Rational::from_integer(1)))
            .expect("validated bins cover [0, inf]")
    }
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self::with_beta(Rational::from_integer(2))
    }
}

/// Categorizes a defined growth rate.
pub fn theta<'c>(gr: &GrowthRate, config: &'c DetectConfig) -> Result<&'c str, DetectError> {
    if !gr.is_defined() {
        return Err(DetectError::UndefinedGrowthRate);
    }
    config
        .theta_bins
        .lookup(gr)
        .ok_or_else(|| DetectError::InvalidConfig("theta bins do not cover value".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmergingChange {
    pub pattern: Pattern,
    pub from_window: usize,
    pub to_window: usize,
    pub growth_rate: GrowthRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Increase,
    Decrease,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Increase => "+",
            Sign::Decrease => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrendChange {
    pub pattern: Pattern,
    pub window_span: Vec<usize>,
    pub sign: Sign,
    pub mode: TrendMode,
    pub lambda_value: Option<BigRational>,
}

impl TrendChange {
    /// Spans longer than two windows.
    pub fn is_global(&self) -> bool {
        self.window_span.len() > 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicChange {
    pub pattern: Pattern,
    pub period: usize,
    pub category: String,
    /// Indices of window pairs `(i, i + 1)` within the table sequence.
    pub occurrence_indices: Vec<usize>,
    pub repetitions: usize,
    /// All occurrences share one raw growth rate and the spacing is exact.
    pub exact: bool,
    /// The shared raw growth rate when `exact`.
    pub growth_rate: Option<GrowthRate>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PeriodicDetection {
    pub changes: Vec<PeriodicChange>,
    /// Chains in the stable category left out of `changes`.
    pub suppressed_stable: usize,
}

fn check_consecutive(tables: &[FrequencyTable]) -> Result<(), DetectError> {
    for w in tables.windows(2) {
        if w[1].window_id != w[0].window_id + 1 {
            return Err(DetectError::NonConsecutive {
                earlier: w[0].window_id,
                later: w[1].window_id,
            });
        }
    }
    Ok(())
}

/// For each pattern in the union of codes, its frequency in every table.
fn frequency_rows(
    tables: &[FrequencyTable],
) -> Result<Vec<(&Pattern, Vec<Frequency>)>, DetectError> {
    let codes: BTreeSet<&str> = tables.iter().flat_map(|t| t.codes()).collect();
    codes
        .into_iter()
        .map(|code| {
            let mut pattern = None;
            let freqs = tables
                .iter()
                .map(|t| {
                    let e = t.get(code).ok_or_else(|| DetectError::NotUnionEvaluated {
                        code: code.to_string(),
                        window: t.window_id,
                    })?;
                    pattern.get_or_insert(&e.pattern);
                    Ok(e.frequency)
                })
                .collect::<Result<Vec<_>, DetectError>>()?;
            Ok((pattern.expect("code came from a table"), freqs))
        })
        .collect()
}

/// Patterns whose growth rate from `earlier` to `later` exceeds `beta`,
/// sorted by descending growth rate, then code.
pub fn detect_emerging(
    earlier: &FrequencyTable,
    later: &FrequencyTable,
    config: &DetectConfig,
) -> Result<Vec<EmergingChange>, DetectError> {
    config.validate()?;
    let pair = [earlier.clone(), later.clone()];
    check_consecutive(&pair)?;
    let mut out: Vec<EmergingChange> = frequency_rows(&pair)?
        .into_iter()
        .filter_map(|(p, f)| {
            let gr = GrowthRate::from_frequencies(f[1], f[0]);
            gr.exceeds(&config.beta).then(|| EmergingChange {
                pattern: p.clone(),
                from_window: earlier.window_id,
                to_window: later.window_id,
                growth_rate: gr,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.growth_rate
            .defined_cmp(&a.growth_rate)
            .then_with(|| a.pattern.code().cmp(b.pattern.code()))
    });
    Ok(out)
}

/// Maximal runs `[start, end]` (window positions) where consecutive
/// frequencies strictly move in `sign`'s direction.
pub fn monotone_runs(freqs: &[Frequency], sign: Sign) -> Vec<(usize, usize)> {
    let step = |i: usize| match sign {
        Sign::Increase => freqs[i] < freqs[i + 1],
        Sign::Decrease => freqs[i] > freqs[i + 1],
    };
    let mut runs = Vec::new();
    let mut i = 0;
    while i + 1 < freqs.len() {
        if step(i) {
            let start = i;
            while i + 1 < freqs.len() && step(i) {
                i += 1;
            }
            runs.push((start, i));
        } else {
            i += 1;
        }
    }
    runs
}

/// Trend changes over a union-evaluated sequence of consecutive tables.
pub fn detect_trends(
    tables: &[FrequencyTable],
    config: &DetectConfig,
) -> Result<Vec<TrendChange>, DetectError> {
    config.validate()?;
    if tables.len() < 2 {
        return Err(DetectError::TooFewTables {
            need: 2,
            got: tables.len(),
        });
    }
    check_consecutive(tables)?;
    let ids: Vec<usize> = tables.iter().map(|t| t.window_id).collect();
    let mut out = Vec::new();
    for (pattern, freqs) in frequency_rows(tables)? {
        match config.trend_mode {
            TrendMode::Strict => {
                let mut found: Vec<(usize, usize, Sign)> = Vec::new();
                for sign in [Sign::Increase, Sign::Decrease] {
                    found.extend(
                        monotone_runs(&freqs, sign)
                            .into_iter()
                            .map(|(a, b)| (a, b, sign)),
                    );
                }
                found.sort();
                out.extend(found.into_iter().map(|(a, b, sign)| TrendChange {
                    pattern: pattern.clone(),
                    window_span: ids[a..=b].to_vec(),
                    sign,
                    mode: TrendMode::Strict,
                    lambda_value: None,
                }));
            }
            TrendMode::Lambda => {
                let eps = to_big(&config.trend_epsilon);
                let mut sum = BigRational::zero();
                for m in 1..freqs.len() {
                    sum += to_big(&freqs[m - 1].ratio());
                    let lambda = &sum / BigRational::from_integer(BigInt::from(m));
                    let last = to_big(&freqs[m].ratio());
                    let sign = if last > &lambda + &eps {
                        Sign::Increase
                    } else if last < &lambda - &eps {
                        Sign::Decrease
                    } else {
                        continue;
                    };
                    out.push(TrendChange {
                        pattern: pattern.clone(),
                        window_span: ids[..=m].to_vec(),
                        sign,
                        mode: TrendMode::Lambda,
                        lambda_value: Some(lambda),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A recurrence of one category at window-pair positions spaced by
/// `period` (within jitter of `start + k * period`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chain<C> {
    pub period: usize,
    pub category: C,
    pub occurrences: Vec<usize>,
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

/// Periodic occurrence chains in a category sequence.
///
/// For each period and each defined start position the chain picks, for
/// k = 1, 2, ..., the earliest position after the previous occurrence that
/// lies within `jitter` of `start + k * period` and has the start's
/// category, stopping at the first k without one. The earliest choice
/// yields the longest possible chain and, among those, the
/// lexicographically smallest. Chains with fewer than `min_repetitions`
/// occurrences are dropped, as are chains whose occurrences are a strict
/// subset of another kept chain with the same period and category.
pub fn find_chains<C: Clone + Eq + Ord>(
    categories: &[Option<C>],
    period_max: usize,
    jitter: usize,
    min_repetitions: usize,
) -> Vec<Chain<C>> {
    let n = categories.len();
    let mut out = Vec::new();
    for period in 1..=period_max {
        let mut kept: Vec<Chain<C>> = Vec::new();
        for start in 0..n {
            let Some(cat) = &categories[start] else {
                continue;
            };
            let mut occ = vec![start];
            for k in 1.. {
                let target = start + k * period;
                let lo = target.saturating_sub(jitter).max(occ[occ.len() - 1] + 1);
                let hi = (target + jitter).min(n.saturating_sub(1));
                if lo > hi {
                    break;
                }
                match (lo..=hi).find(|&i| categories[i].as_ref() == Some(cat)) {
                    Some(i) => occ.push(i),
                    None => break,
                }
            }
            if occ.len() >= min_repetitions {
                kept.push(Chain {
                    period,
                    category: cat.clone(),
                    occurrences: occ,
                });
            }
        }
        let survivors: Vec<Chain<C>> = kept
            .iter()
            .filter(|c| {
                !kept.iter().any(|o| {
                    o.category == c.category
                        && o.occurrences.len() > c.occurrences.len()
                        && is_subset(&c.occurrences, &o.occurrences)
                })
            })
            .cloned()
            .collect();
        out.extend(survivors);
    }
    out.sort();
    out
}

/// Periodic changes in the categorized growth-rate sequence of every pattern.
pub fn detect_periodic(
    tables: &[FrequencyTable],
    config: &DetectConfig,
) -> Result<PeriodicDetection, DetectError> {
    config.validate()?;
    if tables.len() < 3 {
        return Err(DetectError::TooFewTables {
            need: 3,
            got: tables.len(),
        });
    }
    check_consecutive(tables)?;
    let stable = config.stable_category();
    let mut result = PeriodicDetection::default();
    for (pattern, freqs) in frequency_rows(tables)? {
        let rates: Vec<GrowthRate> = freqs
            .windows(2)
            .map(|w| GrowthRate::from_frequencies(w[1], w[0]))
            .collect();
        let cats: Vec<Option<&str>> = rates.iter().map(|g| theta(g, config).ok()).collect();
        for chain in find_chains(
            &cats,
            config.period_max,
            config.jitter,
            config.min_repetitions,
        ) {
            if chain.category == stable && !config.include_stable {
                result.suppressed_stable += 1;
                continue;
            }
            let first = rates[chain.occurrences[0]];
            let same_raw = chain.occurrences.iter().all(|&i| rates[i] == first);
            let exact = config.jitter == 0 && same_raw;
            result.changes.push(PeriodicChange {
                pattern: pattern.clone(),
                period: chain.period,
                category: chain.category.to_string(),
                repetitions: chain.occurrences.len(),
                occurrence_indices: chain.occurrences,
                exact,
                growth_rate: exact.then_some(first),
            });
        }
    }
    Ok(result)
}
