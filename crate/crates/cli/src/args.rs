use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ergm-sampled", version, about = "ERGM inference from sampled networks")]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub rng_seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw networks from an ERGM.
    Simulate(SimulateArgs),
    /// Apply a sampling design to a network.
    Sample(SampleArgs),
    /// MLE from a complete network.
    Fit(FitArgs),
    /// Face-value MLE from a partially observed network.
    FitMissing(FitMissingArgs),
    /// KL divergence between two parameter vectors.
    Kl(KlArgs),
    /// Exact (or Monte Carlo) probability of an observation pattern.
    DesignProb(DesignProbArgs),
    /// Horvitz-Thompson edge-total estimate (ego-centric designs only).
    Ht(HtArgs),
    /// The seed-pair sampling study.
    Study(StudyArgs),
    /// Mean-value parameters E_eta[Z].
    MeanValue(MeanValueArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dense 0/1 adjacency CSV with a header row of labels.
    #[arg(long, conflicts_with_all = ["edges", "lazega"])]
    pub adjacency: Option<PathBuf>,
    /// Edge list of 1-based node numbers.
    #[arg(long, conflicts_with = "lazega")]
    pub edges: Option<PathBuf>,
    /// Node count for edge lists (defaults to the largest node number).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Attribute CSV (`node,<name>,...`).
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    /// Directory with adjacency.csv and attributes.csv.
    #[arg(long)]
    pub lazega: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Comma-separated terms, e.g. `edges,gwesp(0.7781),nodal(seniority),match(office)`;
    /// `lazega` selects the seven-term collaboration model. Defaults to `edges`,
    /// or `lazega` for `study`.
    #[arg(long)]
    pub terms: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Retained draws.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    /// Proposals before the first draw (default 10 n^2).
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Proposals between draws (default n^2).
    #[arg(long)]
    pub thin: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitControl {
    /// Draws per chain at each anchor.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub max_anchors: usize,
    /// Convergence threshold in Monte Carlo standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub convergence_se: f64,
    #[arg(long, default_value_t = 20.0)]
    pub eta_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignKind {
    Ego,
    Trace,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = DesignKind::Ego)]
    pub design: DesignKind,
    /// Tracing waves: a count or `sat`.
    #[arg(long, default_value = "1")]
    pub waves: String,
    /// Bernoulli inclusion probability of the initial sample.
    #[arg(long, conflicts_with = "seeds")]
    pub psi: Option<f64>,
    /// Fixed number of initial seeds drawn without replacement.
    #[arg(long)]
    pub seeds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated natural parameters.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub design: DesignArgs,
    /// Fixed initial sample `i,j` (1-based) instead of a random draw.
    #[arg(long)]
    pub seed_pair: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub control: FitControl,
}

#[derive(Debug, Args)]
pub struct FitMissingArgs {
    /// Partial network: JSON (`matrix` of 0/1/null) or CSV with `NA` cells.
    #[arg(long)]
    pub partial: PathBuf,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long)]
    pub directed: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub control: FitControl,
}

#[derive(Debug, Args)]
pub struct KlArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = 8)]
    pub bridge_steps: usize,
}

#[derive(Debug, Args)]
pub struct DesignProbArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Observation pattern, given as a partial network file.
    #[arg(long)]
    pub observed: PathBuf,
    #[command(flatten)]
    pub design: DesignArgs,
    /// Use this many Monte Carlo draws instead of exact enumeration.
    #[arg(long)]
    pub mc: Option<usize>,
    /// Largest n enumerated exactly.
    #[arg(long, default_value_t = 20)]
    pub enumeration_bound: usize,
}

#[derive(Debug, Args)]
pub struct HtArgs {
    #[arg(long)]
    pub partial: PathBuf,
    #[arg(long)]
    pub directed: bool,
    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub control: FitControl,
    /// Number of seed pairs drawn uniformly.
    #[arg(long, default_value_t = 50, conflicts_with = "full")]
    pub subsample: usize,
    /// Run every seed pair.
    #[arg(long)]
    pub full: bool,
    #[arg(long, default_value_t = 2)]
    pub waves: usize,
    /// Bootstrap replicates for efficiency-loss denominators; 0 skips them.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// Draws per bridge step for KL estimates.
    #[arg(long, default_value_t = 1000)]
    pub kl_draws: usize,
    #[arg(long, default_value_t = 8)]
    pub bridge_steps: usize,
    /// Also write the (dyads, KL) table here.
    #[arg(long)]
    pub figure2: Option<PathBuf>,
    /// KL values above this are flagged as outside the plotted region.
    #[arg(long, default_value_t = 10.0)]
    pub outlier_cutoff: f64,
    /// Also write per-sample records (JSON) here.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeanValueArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: String,
    #[command(flatten)]
    pub chain: ChainArgs,
}
