use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "linkpred",
    about = "Rank potential links in partially observed networks",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Score node pairs of an observed network and write a ranked CSV.
    Predict(PredictArgs),
    /// Cross-validate the penalty weight and write the score table.
    Tune(PredictArgs),
    /// Generate synthetic networks, fit both criteria, write ROC curves.
    Simulate(SimulateArgs),
    /// Evaluate a score file against a known truth on the unobserved pairs.
    Evaluate(EvaluateArgs),
}

#[derive(Args, Clone)]
pub struct SimilarityArgs {
    /// Similarity source: covariates, jaccard or fraction-match.
    /// Defaults to covariates when a covariate file is given.
    #[arg(long)]
    pub similarity: Option<String>,

    /// Covariate CSV (n rows, p numeric columns).
    #[arg(long)]
    pub covariates: Option<PathBuf>,

    /// The covariate file has a header row to skip.
    #[arg(long, default_value_t = false)]
    pub header: bool,

    /// Kernel bandwidth; "auto" uses a quarter of the median pairwise
    /// distance.
    #[arg(long, default_value = "auto")]
    pub sigma: String,

    /// Zero out similarity entries below this threshold.
    #[arg(long, default_value_t = 0.1)]
    pub truncate: f64,
}

#[derive(Args, Clone)]
pub struct SolverArgs {
    /// Penalty weight; omit to select it by cross-validation.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Select lambda by K-fold cross-validation (implied when --lambda is
    /// absent).
    #[arg(long, default_value_t = false)]
    pub cv: bool,

    /// Comma-separated ascending lambda grid for cross-validation.
    #[arg(long)]
    pub lambda_grid: Option<String>,

    #[arg(long, default_value_t = 5)]
    pub cv_folds: usize,

    /// Held-out scoring rule: sse or auc.
    #[arg(long, default_value = "sse")]
    pub cv_score: String,

    /// Solution method: direct or bcd.
    #[arg(long, default_value = "direct")]
    pub method: String,

    /// Power-transform exponent for the undirected BCD path.
    #[arg(long, default_value_t = 10)]
    pub q: u32,

    /// BCD convergence tolerance (max absolute score change per sweep).
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,

    /// Well-posedness ridge.
    #[arg(long, default_value_t = 1e-10)]
    pub ridge: f64,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Edge-list file ("i j" per line, # comments).
    #[arg(long)]
    pub input: PathBuf,

    /// Node count.
    #[arg(long)]
    pub n: usize,

    /// Treat the network as directed.
    #[arg(long, default_value_t = false)]
    pub directed: bool,

    /// Observation mask file listing certified pairs; switches the loss to
    /// the partial sum.
    #[arg(long)]
    pub mask: Option<PathBuf>,

    #[command(flatten)]
    pub similarity: SimilarityArgs,

    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Model family: a, a', b, b', c, c', d, d' or sbm.
    #[arg(long)]
    pub model: String,

    #[arg(long)]
    pub n: usize,

    /// Probability that an entry of the true network is certified.
    #[arg(long)]
    pub alpha: f64,

    /// Probability an absent edge is recorded correctly. The simulation
    /// protocol certifies observed entries, which requires beta = 1.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,

    /// Number of replicates.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,

    /// Covariate dimension.
    #[arg(long, default_value_t = 5)]
    pub p: usize,

    /// Block count for the sbm family.
    #[arg(long, default_value_t = 2)]
    pub sbm_blocks: usize,

    /// Within-block edge probability for the sbm family.
    #[arg(long, default_value_t = 0.6)]
    pub sbm_within: f64,

    /// Between-block edge probability for the sbm family.
    #[arg(long, default_value_t = 0.1)]
    pub sbm_between: f64,

    /// Use the block labels as an oracle similarity (sbm only).
    #[arg(long, default_value_t = false)]
    pub oracle_w: bool,

    /// Write the generated instances (truth, observed, mask, covariates,
    /// probabilities) next to the curves.
    #[arg(long, default_value_t = false)]
    pub dump_instances: bool,

    #[command(flatten)]
    pub similarity: SimilarityArgs,

    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Score CSV as written by predict.
    #[arg(long)]
    pub scores: PathBuf,

    /// True network edge list.
    #[arg(long)]
    pub truth: PathBuf,

    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = false)]
    pub directed: bool,

    /// Observation mask; pairs NOT listed form the test set.
    #[arg(long)]
    pub mask: PathBuf,

    #[arg(long)]
    pub out: PathBuf,
}
