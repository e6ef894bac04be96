use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;

use error::CliError;

#[derive(Parser)]
#[command(name = "holv", version, about = "Higher-order Lotka-Volterra and polynomial tensor equation toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Numerical tolerance; each command documents what it bounds.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file, or output directory for `simulate`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Method {
    S,
    M,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    General,
    Cooperative,
    Competitive,
    TwoFaction,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a tensor (M, H, H+, S, dominance, irreducibility).
    Classify {
        file: PathBuf,
        /// Candidate S-certificate, comma separated.
        #[arg(long, value_delimiter = ',')]
        hint: Option<Vec<f64>>,
    },
    /// Solve a polynomial tensor system `sum A_i x^{i-1} = b`.
    Solve {
        file: PathBuf,
        /// Shared S-certificate, comma separated.
        #[arg(long, value_delimiter = ',')]
        cert: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Method::S)]
        method: Method,
    },
    /// Norm bounds and solution enumeration for a quadratic complementarity problem.
    Pcp {
        file: PathBuf,
        #[arg(long)]
        bounds: bool,
        #[arg(long)]
        solve: bool,
    },
    /// Enumerate and classify the equilibria of a model.
    Equilibria { file: PathBuf },
    /// Global stability conditions on the box `[eps, r_hat]^n` and the
    /// winner-take-all test for competitive models.
    Stability {
        file: PathBuf,
        #[arg(long)]
        r_hat: f64,
        #[arg(long)]
        eps: f64,
        /// Dominance weights, comma separated (default all ones).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Simulate trajectories from given or random initial conditions.
    Simulate {
        file: PathBuf,
        /// Initial state, comma separated. Without it `--runs` random
        /// states are drawn from `(0, 10]` using `--seed`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
    },
    /// Generate a random model with the scenario's sign pattern.
    Scenario {
        #[arg(value_enum)]
        kind: Kind,
        /// Dimension, or `m,n` for two-faction models.
        #[arg(value_delimiter = ',')]
        dims: Vec<usize>,
    },
    /// Track the equilibrium of `1 + Ax + eps Bx^2 = 0` along an epsilon grid.
    Continuation {
        file: PathBuf,
        /// `start:step:end`, starting at 0.
        #[arg(long, default_value = "0:0.01:1")]
        grid: String,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("HOLV_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("HOLV_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let c = &cli.common;
    match cli.command {
        Command::Classify { file, hint } => commands::classify(c, &file, hint),
        Command::Solve { file, cert, method } => commands::solve(c, &file, cert, method),
        Command::Pcp { file, bounds, solve } => commands::pcp(c, &file, bounds, solve),
        Command::Equilibria { file } => commands::equilibria(c, &file),
        Command::Stability { file, r_hat, eps, weights } => commands::stability(c, &file, r_hat, eps, weights),
        Command::Simulate { file, x0, runs, t_end, rel_tol, abs_tol } => {
            commands::simulate(c, &file, x0, runs, t_end, rel_tol, abs_tol)
        }
        Command::Scenario { kind, dims } => commands::scenario(c, kind, &dims),
        Command::Continuation { file, grid } => commands::continuation(c, &file, &grid),
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
