//! `dpcomb`: generate instances, run the private mechanisms, audit their
//! privacy exactly, and time the heavy routines.
//!
//! Exit status: 0 on success, 2 when an audit finds a bound violation,
//! 3 on any configuration or input error.

mod audit;
mod bench;
mod gen;
mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_VIOLATION: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

/// Error carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<dpcomb::Error> for Failure {
    fn from(e: dpcomb::Error) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<dpcomb::instances::InstanceError> for Failure {
    fn from(e: dpcomb::instances::InstanceError) -> Self {
        Failure::config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "dpcomb",
    version,
    about = "Differentially private combinatorial optimization harness"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated instance document.
    Gen(GenArgs),
    /// Run a mechanism for several trials and emit CSV rows.
    Run(RunArgs),
    /// Exact privacy audit over all adjacent inputs of a fixture.
    Audit(AuditArgs),
    /// Wall-clock timings at fixed sizes.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    /// Unweighted vertex cover (graph instances).
    Vc,
    /// Weighted vertex cover (weighted-graph instances).
    Wvc,
    Mincut,
    /// Metric instances, also used for k-median and facility location.
    Metric,
    Kmedian,
    /// Unweighted set cover.
    Setcover,
    /// Weighted set cover.
    Wsetcover,
    /// Combinatorial public projects on coverage valuations.
    Cpp,
    Facility,
    Steiner,
    /// Terminal pairs for Steiner routing.
    Pairs,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// Generator: star, two-clique, random, regular, uniform, line, grid,
    /// kmedian-lb, coverage.
    #[arg(long, default_value = "random")]
    pub kind: String,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Number of sets or resources.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Edge or membership probability.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    /// Bridge edges for two-clique graphs.
    #[arg(long, default_value_t = 1)]
    pub bridge: usize,
    /// Degree for regular graphs.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    /// Diameter for uniform metrics, group gap for kmedian-lb metrics.
    #[arg(long, default_value_t = 1.0)]
    pub diam: f64,
    /// Largest edge length for random metrics.
    #[arg(long, default_value_t = 10)]
    pub max_len: u32,
    /// Groups for kmedian-lb metrics; rows for grid metrics.
    #[arg(long, default_value_t = 2)]
    pub groups: usize,
    /// Agents for coverage instances; pair count for terminal pairs.
    #[arg(long, default_value_t = 5)]
    pub agents: usize,
    /// Probability that an agent targets a coverable element.
    #[arg(long, default_value_t = 0.5)]
    pub target_p: f64,
    /// Comma-separated weight or cost classes.
    #[arg(long, default_value = "1,2,4")]
    pub classes: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// Variant; each problem has a default.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Terminal pairs document for Steiner routing.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Prefix size parameter of the hallucinated vertex cover.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Facility opening cost.
    #[arg(long, default_value_t = 10.0)]
    pub f: f64,
    /// Skip the brute-force optimum.
    #[arg(long)]
    pub no_opt: bool,
    /// Non-private pilot runs used to estimate the amplification target.
    #[arg(long, default_value_t = 51)]
    pub pilot: usize,
}

#[derive(Args, Debug, Clone)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long)]
    pub algo: Option<String>,
    /// Privacy parameter the mechanism runs with.
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Override the checked bound (defaults to the proven one).
    #[arg(long)]
    pub bound_eps: Option<f64>,
    /// Fixture; graph problems default to every graph on `--n` vertices.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Local search rounds for k-median audits.
    #[arg(long, default_value_t = 2)]
    pub rounds: usize,
    /// Audit the halve-augmented transcript of weighted set cover.
    #[arg(long)]
    pub augmented: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = dpcomb::audit::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Smaller sizes for a quick check.
    #[arg(long)]
    pub quick: bool,
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => gen::cmd_gen(&a),
        Command::Run(a) => run::cmd_run(&a),
        Command::Audit(a) => audit::cmd_audit(&a),
        Command::Bench(a) => bench::cmd_bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("dpcomb: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
