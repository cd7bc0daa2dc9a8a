//! Crate-level error with module tags and CLI exit codes.

use thiserror::Error;

use crate::detect::DetectError;
use crate::graph::GraphError;
use crate::miner::MineError;
use crate::oracle::OracleError;
use crate::stream::StreamError;
use crate::windowing::WindowError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph-core: {0}")]
    Graph(#[from] GraphError),
    #[error("windowing: {0}")]
    Window(#[from] WindowError),
    #[error("miner: {0}")]
    Mine(#[from] MineError),
    #[error("change-detect: {0}")]
    Detect(#[from] DetectError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("cli-io: {0}")]
    Stream(#[from] StreamError),
    #[error("cli-io: config: {0}")]
    Config(String),
    #[error("cli-io: {path}: {msg}")]
    Report { path: String, msg: String },
    #[error("cli-io: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// 1 usage/config, 2 parse, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Window(WindowError::InvalidConfig(_))
            | Error::Mine(MineError::InvalidConfig(_))
            | Error::Detect(DetectError::InvalidConfig(_)) => 1,
            Error::Stream(_) | Error::Report { .. } | Error::Io { .. } | Error::Graph(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
