//! Command-line front end for `ntangle-core`.
//!
//! Every subcommand builds a [`Report`]; `main` renders it and maps the
//! outcome to the exit status: 0 all checks pass, 1 a check failed,
//! 2 bad input, 3 internal error.

mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ntangle_core::TangleError;

pub use report::{Format, Record, Report, Value};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ntangle", version, about = "n-tangle of odd-n-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report (or generated state) to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every τ⁽ⁱ⁾, the average and T, P, Q by the reduced formula.
    Compute(StateArgs),
    /// Brute-force contraction next to the reduced formula, with multiplication tallies.
    Oracle(OracleArgs),
    /// Three-qubit cross-check of all tangle formulas.
    Tangle3(Tangle3Args),
    /// Residual-entanglement sums beside T, P, Q.
    Residual(ResidualArgs),
    /// SLOCC transformation law (or local-unitary invariance) on random pairs.
    SloccCheck(SloccArgs),
    /// Permutation invariance of the n-tangle, or the non-invariance witness search.
    PermCheck(PermArgs),
    /// Convex-roof upper bound for a density matrix.
    Roof(RoofArgs),
    /// Write a state file.
    Gen(GenArgs),
    /// Multiplication counts and median timings of both evaluators.
    Bench(BenchArgs),
    /// Run the full invariant suite.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State file.
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    /// Restrict the report to one qubit.
    #[arg(long, value_name = "I")]
    pub qubit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    #[arg(long, value_name = "I")]
    pub qubit: Option<usize>,
    /// Literal loop over every index tuple (n <= 3).
    #[arg(long)]
    pub full_sum: bool,
    /// Largest n the brute-force sum accepts (at most 7).
    #[arg(long, default_value_t = ntangle_core::naive::DEFAULT_ORACLE_CAP)]
    pub cap: usize,
    /// Also evaluate the even-n contraction, which odd n > 3 needs `--force` for.
    #[arg(long)]
    pub even_form: bool,
    #[arg(long)]
    pub force: bool,
    /// Allowed `|fast - oracle| / max(1, oracle)`.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct Tangle3Args {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    /// Allowed pairwise difference between formulas.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    /// Evaluate for this qubit instead of qubit 1.
    #[arg(long, value_name = "I", default_value_t = 1)]
    pub qubit: usize,
    /// Allowed distance between the residual sums and T, P/2, Q/2.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SloccArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Use local unitaries and check invariance instead of scaling.
    #[arg(long)]
    pub unitary: bool,
    /// Largest condition number of a random invertible factor.
    #[arg(long, default_value_t = ntangle_core::slocc::DEFAULT_CONDITION_CAP)]
    pub cap: f64,
}

#[derive(Debug, Args)]
pub struct PermArgs {
    /// Check this state instead of random ones.
    #[arg(long, value_name = "FILE")]
    pub state: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Search for a state and relabeling that change the even-n contraction at odd n.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct RoofArgs {
    /// Density-matrix file.
    #[arg(long, visible_alias = "state", value_name = "FILE")]
    pub density: PathBuf,
    /// Decomposition size; defaults to rank + 2.
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long, default_value_t = ntangle_core::roof::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    /// Sweep improvement below which a restart counts as converged.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Accept more than three qubits.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Ghz,
    W,
    Random,
    Basis,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    /// Bit string for `basis`, qubit 1 first.
    #[arg(long)]
    pub bits: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated odd qubit counts.
    #[arg(long, value_delimiter = ',', default_values_t = [3usize, 5])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    /// Skip timing; the report is then deterministic.
    #[arg(long)]
    pub counts_only: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = ntangle_core::stategen::DEFAULT_SEED)]
    pub seed: u64,
    /// Override every property's tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Random states per qubit count.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Also run the state-level checks on this state.
    #[arg(long, value_name = "FILE")]
    pub state: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<TangleError> for CliError {
    fn from(e: TangleError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// What a subcommand produced: a report, or a file body written verbatim.
#[derive(Debug)]
pub enum Output {
    Report(Report),
    Raw(String),
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match self {
            Output::Report(r) => r.render(format),
            Output::Raw(s) => s.clone(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Output::Report(r) if !r.passed => EXIT_CHECK_FAILED,
            _ => EXIT_PASS,
        }
    }
}

pub fn run(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Compute(a) => commands::compute(a).map(Output::Report),
        Command::Oracle(a) => commands::oracle(a).map(Output::Report),
        Command::Tangle3(a) => commands::tangle3(a).map(Output::Report),
        Command::Residual(a) => commands::residual(a).map(Output::Report),
        Command::SloccCheck(a) => commands::slocc_check(a).map(Output::Report),
        Command::PermCheck(a) => commands::perm_check(a).map(Output::Report),
        Command::Roof(a) => commands::roof(a).map(Output::Report),
        Command::Gen(a) => commands::gen(a).map(Output::Raw),
        Command::Bench(a) => commands::bench(a).map(Output::Report),
        Command::VerifyAll(a) => commands::verify_all(a).map(Output::Report),
    }
}
