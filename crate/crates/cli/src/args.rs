use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "mcgame",
    version,
    about = "Exact and Monte Carlo game-theoretic attributions for model explanations"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Attributions by Monte Carlo sampling, or by enumeration with --exact.
    Explain(ExplainArgs),
    /// Attributions by brute-force enumeration.
    Exact(ExactArgs),
    /// Run one of the synthetic convergence studies.
    Experiment(ExperimentArgs),
    /// Check the structural properties of the exact values on a configuration.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueArg {
    Shapley,
    Banzhaf,
    /// Linear game value with weights from --weights.
    Linear,
    Quotient,
    Owen,
    BanzhafOwen,
    TwoStep,
}

impl ValueArg {
    pub fn needs_partition(self) -> bool {
        matches!(
            self,
            ValueArg::Quotient | ValueArg::Owen | ValueArg::BanzhafOwen | ValueArg::TwoStep
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// One pass over the background rows.
    True,
    /// Rows resampled with replacement, --iterations times.
    Empirical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Shapley,
    Banzhaf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ObservationArgs {
    /// Explain background row N (1-based).
    #[arg(long, value_name = "N")]
    pub row: Option<usize>,
    /// Explain an explicit point, comma separated.
    #[arg(long, value_name = "X1,X2,...", allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Explain every background row.
    #[arg(long)]
    pub all_rows: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Model configuration file (JSON).
    #[arg(long, value_name = "FILE", required_unless_present = "expression")]
    pub model: Option<PathBuf>,
    /// Model given inline as an expression in x1..xn.
    #[arg(long, value_name = "EXPR", conflicts_with = "model")]
    pub expression: Option<String>,
    /// Background dataset (CSV with a header row).
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    #[command(flatten)]
    pub observation: ObservationArgs,
    /// Feature groups as a JSON list of 1-based index lists, e.g. [[1,2],[3]].
    #[arg(long, value_name = "JSON")]
    pub partition: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Output file (defaults to standard output).
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(value_enum)]
    pub value: ValueArg,
    #[command(flatten)]
    pub input: InputArgs,
    /// Enumerate every coalition instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Monte Carlo iterations in empirical mode [default: 4096].
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Weight scheme of a quotient value [default: shapley].
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Explicit weight table (JSON) for `linear` or `quotient`.
    #[arg(long, value_name = "FILE", conflicts_with = "scheme")]
    pub weights: Option<PathBuf>,
    /// Largest player count the exact oracle enumerates over [default: 20].
    #[arg(long)]
    pub limit: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(value_enum)]
    pub value: ValueArg,
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, value_name = "FILE", conflicts_with = "scheme")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub limit: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of 1a, 1b, 2a, 2b, 3a, 3b.
    pub id: String,
    /// Number of predictors (1b: 4, 5, 10, 16; 2b and 3b: 6, 10, 14, 18).
    #[arg(long)]
    pub p: Option<usize>,
    /// Accept a predictor count outside the standard values.
    #[arg(long, requires = "p")]
    pub any_p: bool,
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    /// Smallest iteration count is 2^KMIN.
    #[arg(long, default_value_t = 9)]
    pub kmin: u32,
    /// Largest iteration count is 2^KMAX.
    #[arg(long, default_value_t = 14)]
    pub kmax: u32,
    /// Background dataset size.
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for convergence.csv and summary.json.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}
