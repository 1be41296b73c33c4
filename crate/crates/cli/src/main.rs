mod commands;
mod demo;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use im_infer::engine::Assertion;
use im_infer::par::{parse_thread_cap, with_threads, THREADS_ENV};
use im_infer::ImError;

pub const DEFAULT_SEED: u64 = 20160518;

/// Belief functions and validity audits for inferential models.
#[derive(Debug, Parser)]
#[command(name = "im-infer", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo belief and plausibility of an assertion.
    Believe(BelieveArgs),
    /// Singleton plausibility on a grid of theta values (CSV).
    Curve(CurveArgs),
    /// The 100(1-alpha)% plausibility region (JSON).
    Interval(IntervalArgs),
    /// Validity or coverage audit (JSON); exit status 4 if a bound fails.
    Audit(AuditArgs),
    /// IM belief versus default-prior posterior quantiles (CSV).
    Compare(CompareArgs),
    /// Writes the fixed-seed demo datasets.
    DemoData(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    NormalMean,
    NormalCv,
}

#[derive(Debug, Args)]
pub struct ObservationArgs {
    /// Observed value (normal-mean).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "data")]
    pub x: Option<f64>,
    /// Data file: one value per line, or CSV with an `x` column (normal-cv).
    #[arg(long)]
    pub data: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct BelieveArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    #[command(flatten)]
    pub obs: ObservationArgs,
    /// Interval union such as "(-inf,9] u [11,inf)".
    #[arg(long, value_parser = parse_assertion)]
    pub assertion: Assertion,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub draws: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value = "normal-cv")]
    pub model: ModelName,
    #[command(flatten)]
    pub obs: ObservationArgs,
    /// lo:hi:steps
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-20:20:401")]
    pub theta_grid: (f64, f64, usize),
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    #[command(flatten)]
    pub obs: ObservationArgs,
    #[arg(long, default_value_t = 0.05, value_parser = parse_unit_open)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditMode {
    /// P{b(A) > 1 - alpha} <= alpha for a false assertion.
    Validity,
    /// P{p(A) <= alpha} <= alpha for a true assertion.
    Plausibility,
    /// Coverage of the plausibility region at each alpha.
    Coverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Closed,
    Mc,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum, default_value = "validity")]
    pub mode: AuditMode,
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// True theta (normal-mean).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// True mean (normal-cv).
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// True standard deviation (normal-cv).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Sample size (normal-cv).
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_parser = parse_assertion)]
    pub assertion: Option<Assertion>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Comma-separated alpha levels.
    #[arg(long, value_parser = parse_unit_open, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.25,0.5")]
    pub alphas: Vec<f64>,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: MethodName,
    /// Random-set draws per replication with --method mc.
    #[arg(long, default_value_t = 10_000)]
    pub draws: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_parser = parse_assertion, default_value = "(-inf,9]")]
    pub assertion: Assertion,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 100_000)]
    pub posterior_draws: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out_dir: std::path::PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn parse_assertion(s: &str) -> Result<Assertion, String> {
    Assertion::parse(s).map_err(|e| e.to_string())
}

fn parse_unit_open(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err("expected lo:hi:steps".into());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    let steps: usize = steps.trim().parse().map_err(|_| format!("bad step count `{steps}`"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("need finite lo < hi, got {lo}:{hi}"));
    }
    if steps < 2 {
        return Err(format!("need at least 2 steps, got {steps}"));
    }
    Ok((lo, hi, steps))
}

/// Failure of a command, mapped to the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations.
    Usage(String),
    /// Model or data error.
    Model(ImError),
    /// An audit bound was violated; the report has already been written.
    BoundViolated,
}

impl From<ImError> for Failure {
    fn from(e: ImError) -> Self {
        match e {
            ImError::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Model(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match parse_thread_cap(&v) {
            Some(n) => Some(n),
            None => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        },
        Err(_) => None,
    };
    match with_threads(threads, || commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Model(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::BoundViolated) => {
            eprintln!("audit bound violated");
            ExitCode::from(4)
        }
    }
}
