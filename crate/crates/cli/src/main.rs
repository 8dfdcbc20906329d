use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Optimal single-carrier states for transmitting a Cartesian frame.
#[derive(Debug, Parser)]
#[command(name = "spinframe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find the best (a, b) pair for one level by fixed-point iteration.
    Optimize(OptimizeArgs),
    /// Run the oracle checks at small n.
    Verify(VerifyArgs),
    /// Optimize a range of levels and fit a power law to the errors.
    Sweep(SweepArgs),
    /// Estimate transmission errors by sampling Bob's outcomes.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Z,
    Xy,
    Xyz,
    Weighted,
}

#[derive(Debug, Clone, Args)]
pub struct ObjectiveArgs {
    #[arg(long, value_enum, default_value = "xyz")]
    pub objective: ObjectiveKind,
    /// Weight of the z axis (weighted objective only).
    #[arg(long)]
    pub w_z: Option<f64>,
    /// Weight of each of the x and y axes (weighted objective only).
    #[arg(long)]
    pub w_xy: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Random starts tried besides the uniform one.
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    All,
    Coefficients,
    Povm,
    Rotations,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "all")]
    pub check: CheckKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Perturbs one closed-form coefficient before comparing.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inclusive range such as `2..10`, or a single level.
    #[arg(long, value_parser = commands::parse_range)]
    pub n: (u32, u32),
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Smallest level included in the power-law fit.
    #[arg(long)]
    pub fit_from: Option<u32>,
    /// CSV output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Where to write the fit as JSON; defaults to `<output>.fit.json`.
    #[arg(long)]
    pub fit_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrueFrame {
    Haar,
    Identity,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON written by `optimize`.
    #[arg(long, conflicts_with = "n")]
    pub state: Option<PathBuf>,
    /// Optimize this level first instead of reading a state file.
    #[arg(long)]
    pub n: Option<u32>,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "haar")]
    pub true_frame: TrueFrame,
    /// Also write every accepted sample as CSV.
    #[arg(long)]
    pub samples_csv: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
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
    let outcome = match cli.command {
        Command::Optimize(args) => commands::optimize(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Simulate(args) => commands::simulate(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
