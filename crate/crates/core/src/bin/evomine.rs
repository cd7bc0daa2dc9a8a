use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evomine::config::{from_settings, read_settings, RunConfig};
use evomine::pipeline;
use evomine::Error;

#[derive(Debug, Parser)]
#[command(
    version,
    about = "Mine frequent subgraph patterns per time window and report how they change"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split the stream into time windows (windows.csv)
    Partition(StreamArgs),
    /// Partition and mine frequent patterns (windows.csv, patterns.csv)
    Mine(StreamArgs),
    /// Detect changes from a previous `mine` output (changes.jsonl, summary.txt)
    Detect(DetectArgs),
    /// Full pipeline, all four report files
    Run(StreamArgs),
}

#[derive(Debug, Args)]
struct StreamArgs {
    /// Stream file
    stream: PathBuf,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Directory holding windows.csv and patterns.csv
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Args)]
struct Opts {
    /// key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Snapshots per window in fixed mode [default: 10]
    #[arg(long)]
    window_size: Option<String>,
    /// Adaptive partitioning instead of fixed-size windows
    #[arg(long)]
    adaptive: bool,
    /// Divergence threshold for adaptive cuts [default: 0.1]
    #[arg(long)]
    tau: Option<String>,
    /// Smallest adaptive window [default: 5]
    #[arg(long)]
    min_window: Option<String>,
    /// Largest adaptive window [default: 50]
    #[arg(long)]
    max_window: Option<String>,
    /// Minimum frequency, exclusive; decimal or a/b [default: 1/2]
    #[arg(long)]
    alpha: Option<String>,
    /// Largest pattern size in edges [default: 3]
    #[arg(long)]
    max_edges: Option<String>,
    /// Growth-rate threshold, exclusive, > 1 [default: 2]
    #[arg(long)]
    beta: Option<String>,
    /// strict or lambda [default: strict]
    #[arg(long)]
    trend_mode: Option<String>,
    /// Dead band around lambda [default: 0]
    #[arg(long)]
    trend_epsilon: Option<String>,
    /// Longest period tried [default: 6]
    #[arg(long)]
    period_max: Option<String>,
    /// Allowed offset per periodic occurrence [default: 0]
    #[arg(long)]
    jitter: Option<String>,
    /// Occurrences needed for a periodic change [default: 3]
    #[arg(long)]
    min_repetitions: Option<String>,
    /// e.g. shrinking<1/2,stable<=2,growing<=inf
    #[arg(long)]
    theta_bins: Option<String>,
    /// Report stable-category periodic chains
    #[arg(long)]
    include_stable: bool,
    /// Comma-separated subset of emerging,trends,periodic
    #[arg(long)]
    detectors: Option<String>,
    /// Output directory [default: out]
    #[arg(long)]
    out: Option<String>,
}

impl Opts {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut settings = match &self.config {
            Some(path) => read_settings(path)?,
            None => Vec::new(),
        };
        let flags = [
            ("window-size", &self.window_size),
            ("tau", &self.tau),
            ("min-window", &self.min_window),
            ("max-window", &self.max_window),
            ("alpha", &self.alpha),
            ("max-edges", &self.max_edges),
            ("beta", &self.beta),
            ("trend-mode", &self.trend_mode),
            ("trend-epsilon", &self.trend_epsilon),
            ("period-max", &self.period_max),
            ("jitter", &self.jitter),
            ("min-repetitions", &self.min_repetitions),
            ("theta-bins", &self.theta_bins),
            ("detectors", &self.detectors),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.push((key.to_string(), v.clone()));
            }
        }
        if self.adaptive {
            settings.push(("adaptive".into(), "true".into()));
        }
        if self.include_stable {
            settings.push(("include-stable".into(), "true".into()));
        }
        from_settings(settings.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Partition(a) => {
            let ws = pipeline::run_partition(&a.opts.resolve()?, &a.stream)?;
            eprintln!("{} windows", ws.len());
        }
        Command::Mine(a) => pipeline::run_mine(&a.opts.resolve()?, &a.stream)?,
        Command::Detect(a) => {
            pipeline::run_detect(&a.opts.resolve()?, &a.input)?;
        }
        Command::Run(a) => {
            let analysis = pipeline::run_pipeline(&a.opts.resolve()?, &a.stream)?;
            eprintln!(
                "{} windows, {} emerging, {} trends, {} periodic",
                analysis.windows.len(),
                analysis.detections.emerging.len(),
                analysis.detections.trends.len(),
                analysis.detections.periodic.changes.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
