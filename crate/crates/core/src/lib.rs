//! Change detection in evolving networks.
//!
//! A stream of labeled graph snapshots is cut into consecutive time
//! windows ([`windowing`]), frequent connected subgraph patterns are mined
//! per window ([`miner`]), and the frequency dynamics of those patterns are
//! classified into emerging, trend and periodic changes ([`detect`]).
//! [`oracle`] holds brute-force reference implementations for testing and
//! [`pipeline`] ties everything to files on disk.

pub mod config;
pub mod detect;
pub mod dfs_code;
pub mod error;
pub mod graph;
pub mod miner;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod report;
pub mod stream;
pub mod windowing;

pub use detect::{
    detect_emerging, detect_periodic, detect_trends, growth_rate, theta, DetectConfig,
    EmergingChange, GrowthRate, PeriodicChange, PeriodicDetection, Sign, ThetaBins, TrendChange,
    TrendMode,
};
pub use error::{Error, Result};
pub use graph::{canonical_code, is_subgraph, GraphError, Label, Pattern, Snapshot};
pub use miner::{
    evaluate_patterns, frequency, mine_frequent, Frequency, FrequencyTable, MiningConfig,
};
pub use rational::Rational;
pub use windowing::{
    adaptive_partition, fixed_partition, snapshot_distribution, PartitionConfig, PartitionMode,
    TimeWindow,
};
