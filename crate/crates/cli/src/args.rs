use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Build, explain and evaluate explanatory multiverses.
///
/// Every flag can also be set through an environment variable named
/// `MULTIVERSE_<FLAG>` (upper case, dashes as underscores).
#[derive(Parser, Debug)]
#[command(name = "multiverse", version)]
pub struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, env = "MULTIVERSE_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the k-NN multiverse graph and write it as JSON.
    Build(BuildArgs),
    /// Rank the counterfactual paths of one factual row and pick the optimum.
    Explain(ExplainArgs),
    /// Compare supplied paths: normalization, direction difference, branching, opportunity.
    Pathmetrics(PathmetricsArgs),
    /// Nearest versus top-c selection over every undesired row, as CSV.
    Evaluate(EvaluateArgs),
    /// Serve the navigation HTTP API.
    Serve(ServeArgs),
    /// Post-hoc paths through dataset rows for externally produced counterfactuals.
    Bsp(BspArgs),
    /// Write the two-moons fixture as CSV.
    Moons(MoonsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long, env = "MULTIVERSE_DATA")]
    pub data: PathBuf,
    /// Feature schema (TOML). Without it every non-label column is a free numeric feature.
    #[arg(long, env = "MULTIVERSE_SCHEMA")]
    pub schema: Option<PathBuf>,
    #[arg(long, env = "MULTIVERSE_LABEL", default_value = "label")]
    pub label: String,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ModelArgs {
    /// Use the built-in k-NN classifier with this many neighbours.
    #[arg(long, env = "MULTIVERSE_KNN_K")]
    pub knn_k: Option<usize>,
    /// Class probabilities per dataset row (CSV, header = class identifiers).
    #[arg(long, env = "MULTIVERSE_PREDICTIONS")]
    pub predictions: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Outgoing arcs kept per vertex.
    #[arg(long, env = "MULTIVERSE_K", default_value_t = 20)]
    pub k: usize,
    #[arg(long, env = "MULTIVERSE_LAMBDA", default_value_t = 1.0)]
    pub lambda: f64,
    /// Minimum target-class probability for a counterfactual candidate.
    #[arg(long, env = "MULTIVERSE_THRESHOLD")]
    pub threshold: f64,
    #[arg(long, env = "MULTIVERSE_TARGET_CLASS")]
    pub target_class: u32,
}

#[derive(Args, Debug, Clone)]
pub struct AltArgs {
    #[arg(long, env = "MULTIVERSE_ALT_COUNT", default_value_t = 5)]
    pub alt_count: usize,
    #[arg(long, env = "MULTIVERSE_ALT_SEPARATION", default_value_t = 1.0)]
    pub alt_separation: f64,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Output file; standard output when omitted.
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    /// Row index of the factual instance.
    #[arg(long, env = "MULTIVERSE_FACTUAL")]
    pub factual: usize,
    /// Discount for branching factors along a path.
    #[arg(long, env = "MULTIVERSE_GAMMA")]
    pub gamma: f64,
    /// How many of the closest candidates compete on opportunity.
    #[arg(long, env = "MULTIVERSE_TOP_C")]
    pub top_c: usize,
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PathmetricsArgs {
    /// JSON file holding one path document or an array of them; repeatable.
    #[arg(long = "paths", env = "MULTIVERSE_PATHS", value_delimiter = ',', required = true)]
    pub paths: Vec<PathBuf>,
    /// Comparison points per normalized path.
    #[arg(long, env = "MULTIVERSE_O", default_value_t = 10)]
    pub o: usize,
    /// Separation at which two paths count as diverged.
    #[arg(long, env = "MULTIVERSE_EPSILON")]
    pub epsilon: f64,
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub alt: AltArgs,
    /// Pool sizes to compare, comma separated.
    #[arg(long, env = "MULTIVERSE_TOP_C", value_delimiter = ',', required = true)]
    pub top_c: Vec<usize>,
    /// Summary CSV; standard output when omitted.
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
    /// Also write every per-row selection as JSON.
    #[arg(long, env = "MULTIVERSE_SELECTIONS")]
    pub selections: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, env = "MULTIVERSE_ADDR", default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    #[arg(long, env = "MULTIVERSE_IDLE_TIMEOUT_SECS", default_value_t = 3600)]
    pub idle_timeout_secs: u64,
    /// Keep graphs and sessions on disk so they survive a restart.
    #[arg(long, env = "MULTIVERSE_PERSIST_DIR")]
    pub persist_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BspArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, env = "MULTIVERSE_FACTUAL")]
    pub factual: usize,
    /// JSON array of counterfactual points in encoded feature space.
    #[arg(long, env = "MULTIVERSE_COUNTERFACTUALS")]
    pub counterfactuals: PathBuf,
    /// Partitions narrower than this are not split further.
    #[arg(long, env = "MULTIVERSE_TAU")]
    pub tau: f64,
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MoonsArgs {
    #[arg(long, env = "MULTIVERSE_N", default_value_t = 400)]
    pub n: usize,
    #[arg(long, env = "MULTIVERSE_NOISE", default_value_t = 0.2)]
    pub noise: f64,
    #[arg(long, short, env = "MULTIVERSE_OUTPUT")]
    pub output: Option<PathBuf>,
}
