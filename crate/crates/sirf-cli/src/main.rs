//! `sirf` command-line interface.
//!
//! Subcommands: `fit` (train an iteratively reweighted forest bundle),
//! `interactions` (outer-bootstrap stability analysis of signed
//! interactions), `simulate` (Gaussian benchmark of interaction recovery),
//! and `predict` (interaction-restricted rule predictions, surfaces, and
//! threshold reports). Every command is a pure function of its flags, input
//! files, and seed; reruns produce byte-identical outputs regardless of
//! `--threads`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(
    name = "sirf",
    version,
    about = "Signed interaction mining from random forests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Worker threads (default: SIRF_THREADS env var, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an iteratively reweighted random forest and write a model bundle.
    Fit(FitArgs),
    /// Mine and filter signed interactions over an outer bootstrap layer.
    Interactions(InteractionsArgs),
    /// Run a Gaussian simulation benchmark of interaction recovery.
    Simulate(SimulateArgs),
    /// Score rows with an interaction-restricted rule group.
    Predict(PredictArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Training CSV (header row required).
    #[arg(long)]
    train: PathBuf,
    /// Name of the binary response column.
    #[arg(long)]
    response: String,
    /// Accept true/false response tokens in addition to 0/1.
    #[arg(long)]
    bool_labels: bool,
    /// Reweighting iterations.
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Candidate features per node (default: ceil(sqrt(p))).
    #[arg(long)]
    mtry: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    /// Maximum tree depth (default: unlimited).
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output bundle path (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Optional iteration-log CSV path.
    #[arg(long)]
    iteration_log: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct InteractionsArgs {
    /// Model bundle written by `fit`.
    #[arg(long)]
    bundle: PathBuf,
    /// Training CSV (the data the bundle was fitted on).
    #[arg(long)]
    train: PathBuf,
    /// Held-out test CSV for precision metrics.
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long)]
    bool_labels: bool,
    /// Outer bootstrap replicates.
    #[arg(long, default_value_t = 20)]
    bootstraps: usize,
    /// Filtering level.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Intersection trees grown per replicate.
    #[arg(long, default_value_t = 500)]
    rits: usize,
    #[arg(long, default_value_t = 5)]
    rit_depth: usize,
    #[arg(long, default_value_t = 2)]
    rit_children: usize,
    /// Also collect candidates at internal intersection-tree nodes.
    #[arg(long)]
    collect_internal: bool,
    /// Route only in-bag rows when encoding leaves.
    #[arg(long)]
    in_bag_only: bool,
    /// Response class under study.
    #[arg(long, default_value_t = 1)]
    class: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include removed candidates (kept=false) in the reports.
    #[arg(long)]
    keep_all: bool,
    /// JSON report path.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// CSV report path.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct SimulateArgs {
    /// Generative model: single-and, multi-and, or additive-and.
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 20)]
    bootstraps: usize,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 500)]
    rits: usize,
    #[arg(long, default_value_t = 5)]
    rit_depth: usize,
    #[arg(long, default_value_t = 2)]
    rit_children: usize,
    /// Metric ranking candidates: dP, prev, prec, indep, or dPrec.
    #[arg(long, default_value = "dP")]
    rank_by: String,
    /// Minimum interaction order scored.
    #[arg(long, default_value_t = 2)]
    min_order: usize,
    /// Directory for aucs.csv and pr_curves.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct PredictArgs {
    /// Model bundle written by `fit`.
    #[arg(long)]
    bundle: PathBuf,
    /// Interaction in name+sign notation, e.g. "x1+_x2+_x3-".
    #[arg(long)]
    interaction: String,
    /// Input CSV; must contain the interaction's feature columns.
    #[arg(long)]
    input: PathBuf,
    /// Per-row scores CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prediction mode: weighted-average or raw-sum.
    #[arg(long, default_value = "weighted-average")]
    mode: String,
    /// Response-surface CSV path (order-2 or order-3 interactions).
    #[arg(long)]
    surface: Option<PathBuf>,
    /// Fixed feature for order-3 surfaces (default: highest-index member).
    #[arg(long)]
    fix_feature: Option<String>,
    /// Panels for the fixed feature: high, low, or both.
    #[arg(long, default_value = "both")]
    fix_level: String,
    /// Comma-separated quantile levels for the surface grid.
    #[arg(
        long,
        default_value = "0.05,0.15,0.25,0.35,0.45,0.55,0.65,0.75,0.85,0.95"
    )]
    grid_quantiles: String,
    /// Threshold-distribution CSV path.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[command(flatten)]
    common: CommonOpts,
}

fn exit_code_for(err: &sirf::Error) -> u8 {
    use sirf::Error::*;
    match err {
        Io { .. }
        | Csv(_)
        | MissingColumn(_)
        | NonNumericCell { .. }
        | NonBinaryResponse { .. }
        | NonFiniteCell { .. }
        | InvalidDataset(_)
        | DimensionMismatch { .. }
        | DegenerateSplit(_)
        | SingleClass
        | InteractionParse { .. }
        | InteractionAbsent
        | SchemaVersion(_)
        | Json(_) => 3,
        InvalidParameter(_) => 2,
        ReplicateFailed(_, inner) => exit_code_for(inner),
        _ => 4,
    }
}

fn configure_threads(requested: Option<usize>) {
    let threads = requested.or_else(|| {
        std::env::var("SIRF_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        // Ignore failure: the global pool can only be built once (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => {
            configure_threads(args.common.threads);
            commands::fit(args)
        }
        Command::Interactions(args) => {
            configure_threads(args.common.threads);
            commands::interactions(args)
        }
        Command::Simulate(args) => {
            configure_threads(args.common.threads);
            commands::simulate(args)
        }
        Command::Predict(args) => {
            configure_threads(args.common.threads);
            commands::predict(args)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
