use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use domp::algorithms::{Algorithm, StoppingRule};
use domp::bench::{ColumnScaling, Preset};

#[derive(Debug, Parser)]
#[command(
    name = "domp",
    version,
    about = "Greedy sparse recovery: solvers, sweeps, RIC and bound checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover a sparse vector from a matrix and measurements.
    Recover(RecoverArgs),
    /// Success rate against the selection threshold gamma.
    PhaseGamma(PhaseGammaArgs),
    /// Success rate against the iteration budget.
    PhaseIters(PhaseItersArgs),
    /// Success rate against the sparsity level.
    PhaseK(PhaseKArgs),
    /// Iterations and runtime to success as the problem grows.
    Scaling(ScalingArgs),
    /// Exact restricted isometry constants of a small matrix.
    Ric(RicArgs),
    /// Run a numerical verification suite.
    Verify(VerifyArgs),
    /// Write a seeded random instance to text files.
    Generate(GenerateArgs),
}

pub fn gamma_value(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if g > 0.0 && g <= 1.0 {
        Ok(g)
    } else {
        Err(format!("gamma must lie in (0, 1], got {g}"))
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a finite number >= 0")),
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingMode {
    /// Standard-normal entries.
    Raw,
    /// Entries divided by sqrt(m).
    Unit,
}

impl From<ScalingMode> for ColumnScaling {
    fn from(m: ScalingMode) -> Self {
        match m {
            ScalingMode::Raw => ColumnScaling::Raw,
            ScalingMode::Unit => ColumnScaling::InverseSqrtM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Desk,
    Paper,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        }
    }
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Matrix file: header `m n`, then m rows of n numbers.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Measurement file: header `m`, then m numbers.
    #[arg(long)]
    pub measurements: PathBuf,
    #[arg(long, value_parser = positive_count)]
    pub sparsity: usize,
    /// omp, gomp, domp, edomp, cosamp or sp.
    #[arg(long)]
    pub algo: Algorithm,
    #[arg(long, value_parser = gamma_value, default_value_t = 0.9)]
    pub gamma: f64,
    /// max-iter:N, residual:EPS, gradient:EPS or relative:EPS.
    #[arg(long)]
    pub stop: Option<StoppingRule>,
    /// Iteration cap for residual-based rules.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// True signal, for the relative error and success flag.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub group_size: usize,
    /// EDOMP: replace the support by the thresholded one.
    #[arg(long)]
    pub reset_support: bool,
    /// Relative error counted as success (default 1e-5).
    #[arg(long, value_parser = nonnegative)]
    pub success_threshold: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = PresetArg::Desk)]
    pub preset: PresetArg,
    /// Master seed; every instance is derived from it.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_parser = positive_count)]
    pub trials: Option<usize>,
    /// Comma-separated algorithm list.
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<Algorithm>>,
    /// Amplitude a of additive noise a*h; nonzero switches to the 1e-3 criterion.
    #[arg(long, value_parser = nonnegative, default_value_t = 0.0)]
    pub noise: f64,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_parser = positive_count)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = ScalingMode::Raw)]
    pub column_scaling: ScalingMode,
    #[arg(long, value_parser = nonnegative)]
    pub success_threshold: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub group_size: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON provenance sidecar.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// CSV of wall-clock statistics.
    #[arg(long)]
    pub timing: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long, value_parser = positive_count)]
    pub m: Option<usize>,
    #[arg(long, value_parser = positive_count)]
    pub n: Option<usize>,
    /// Comma-separated sparsity levels.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct PhaseGammaArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Comma-separated gamma values (default t/20, t = 1..20).
    #[arg(long, value_delimiter = ',', value_parser = gamma_value)]
    pub gammas: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct PhaseItersArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Comma-separated iteration budgets (default 1 + 3j).
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<usize>>,
    #[arg(long, value_parser = gamma_value, default_value_t = 0.9)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct PhaseKArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, value_parser = gamma_value, default_value_t = 0.9)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Comma-separated row counts m (default 200j); n = 5m, k = 0.3m.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, value_parser = gamma_value, default_value_t = 0.9)]
    pub gamma: f64,
    /// Timed runs per trial after one warm-up run.
    #[arg(long, value_parser = positive_count, default_value_t = 3)]
    pub repeats: usize,
}

#[derive(Debug, Args)]
pub struct RicArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Orders to evaluate; default is every order up to the highest RIP order.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    /// Largest number of supports to enumerate per order.
    #[arg(long, default_value_t = 2_000_000)]
    pub cap: u128,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Proximity of each iterate to the penalized problem.
    #[value(name = "lemma31", alias = "proximity")]
    Proximity,
    /// First-order optimality of the penalized solution.
    Stationarity,
    HelperLemmas,
    TheoremDomp,
    TheoremEdomp,
    Theta,
    RicMonotone,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, value_parser = positive_count)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Theorem suites: rows of the Gaussian matrices.
    #[arg(long, value_parser = positive_count, default_value_t = 8)]
    pub m: usize,
    #[arg(long, value_parser = positive_count, default_value_t = 12)]
    pub n: usize,
    #[arg(long, value_parser = positive_count, default_value_t = 1)]
    pub k: usize,
    /// RIC order multiplier c (at least 3).
    #[arg(long, default_value_t = 3)]
    pub c: usize,
    #[arg(long, value_parser = gamma_value, default_value_t = 0.9)]
    pub gamma: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = positive_count)]
    pub m: usize,
    #[arg(long, value_parser = positive_count)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: usize,
    #[arg(long, value_parser = nonnegative, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, value_enum, default_value_t = ScalingMode::Raw)]
    pub column_scaling: ScalingMode,
    /// Directory receiving matrix.txt, measurements.txt and truth.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
}
