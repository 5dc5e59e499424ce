//! Command-line pipeline: trace logs → call graph → decomposition → metrics.

pub mod commands;
pub mod error;
pub mod files;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use svcsplit::env::Objective;

pub use error::{CliError, MethodSetMismatch};

/// Environment variable holding the log filter (`error`, `warn`, `info`, `debug`, `trace`).
pub const LOG_ENV: &str = "RAKE_LOG_LEVEL";

#[derive(Debug, Parser)]
#[command(name = "svcsplit", version, about = "Decompose a monolith into services from its execution traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the call graph from trace logs.
    Analyze(AnalyzeArgs),
    /// Train an agent on a call graph and write the best decomposition.
    Decompose(DecomposeArgs),
    /// Compute all metrics of a decomposition.
    Evaluate(EvaluateArgs),
    /// Search for the best decomposition exhaustively or by hill climbing.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace log files.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Method-to-capability map (`method_signature,capability` lines or JSON).
    #[arg(long)]
    pub capability_map: Option<PathBuf>,
    /// Graph file to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the graph in DOT format.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ObjectiveArgs {
    /// `mq`, `abcp`, `weighted:<w>`, or `weighted` together with `--weight`.
    #[arg(long)]
    pub objective: Option<String>,
    /// MQ weight of the weighted objective, in [0, 1].
    #[arg(long)]
    pub weight: Option<f64>,
}

impl ObjectiveArgs {
    pub fn resolve(&self) -> Result<Objective, CliError> {
        let name = self.objective.as_deref().map(|s| s.trim().to_ascii_lowercase());
        match (name.as_deref(), self.weight) {
            (None, None) => Ok(Objective::Mq),
            (None | Some("weighted"), Some(w)) => Objective::weighted(w).map_err(|e| CliError::Config(e.to_string())),
            (Some("weighted"), None) => Err(CliError::Config("objective weighted needs --weight".into())),
            (Some(_), Some(_)) => Err(CliError::Config("--weight only applies to the weighted objective".into())),
            (Some(s), None) => s.parse().map_err(|e: svcsplit::env::EnvError| CliError::Config(e.to_string())),
        }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Graph file produced by `analyze`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, default_value_t = 1500)]
    pub episodes: usize,
    /// Passes over all methods per episode.
    #[arg(long, default_value_t = 3)]
    pub pmax: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub minibatch_size: Option<usize>,
    #[arg(long)]
    pub entropy_coef: Option<f64>,
    /// Hidden layer widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// Stop after this many episodes without improvement.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Add a wall-time column to the training log.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Graph file.
    #[arg(long)]
    pub input: PathBuf,
    /// Decomposition file.
    #[arg(long)]
    pub decomposition: PathBuf,
    /// Output directory for metrics.json and metrics.tsv.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Row label; defaults to the decomposition file name.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Exhaustive,
    HillClimb,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Graph file.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[arg(long, value_enum, default_value_t = OracleMode::Exhaustive)]
    pub oracle_mode: OracleMode,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest graph accepted by exhaustive search.
    #[arg(long, default_value_t = svcsplit::oracle::DEFAULT_EXHAUSTIVE_CAP)]
    pub cap: usize,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs one command, writing its human-readable summary to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => commands::analyze(&a, out),
        Command::Decompose(a) => commands::decompose(&a, out).map(|_| ()),
        Command::Evaluate(a) => commands::evaluate(&a, out).map(|_| ()),
        Command::Oracle(a) => commands::oracle(&a, out).map(|_| ()),
    }
}
