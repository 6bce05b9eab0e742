//! `ets`: command-line access to the ets-core library.
//!
//! Inputs are JSON files; results go to stdout (or `--out`) as JSON or CSV.
//! Exit codes: 0 success, 1 validation failure, 2 input error, 3 numerical failure.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ets", version, about = "Extended p-tempered alpha-stable laws")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Suppress diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a spec and report the mass functional of its Rosiński measure.
    Validate { spec: PathBuf },
    /// Characteristic exponent on a grid, as CSV.
    Cf {
        spec: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Convert between tempering, Rosiński and extended representations.
    Transform {
        #[arg(long, value_enum)]
        from: Representation,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Tempering exponent; needed only with `--from tempering`.
        #[arg(long)]
        p: Option<f64>,
        input: PathBuf,
    },
    /// Discretize the extended measure and split it into elementary components.
    Approximate {
        spec: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Draw samples, as CSV.
    Simulate {
        spec: PathBuf,
        #[arg(long)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tau: f64,
        /// Also write the per-point empirical CF gap table here.
        #[arg(long, value_name = "PATH")]
        gaps: Option<PathBuf>,
    },
    /// Convergence diagnostics of a sequence of specs against a target.
    CheckLimit {
        /// Directory of spec files, taken in file-name order.
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Seed-sequence demonstrations of the Gaussian and stable limits.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Debug, Subcommand)]
enum Demo {
    GaussianLimit {
        #[command(flatten)]
        common: DemoArgs,
        /// Target covariance, as a JSON array of rows.
        #[arg(long = "A", value_name = "PATH")]
        a: PathBuf,
    },
    StableLimit {
        #[command(flatten)]
        common: DemoArgs,
        /// Spectral measure of the stable target.
        #[arg(long, value_name = "PATH")]
        sigma: PathBuf,
    },
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,50")]
    n_list: Vec<u32>,
    /// Quadrature nodes per axis for the seed measures.
    #[arg(long, default_value_t = 64)]
    m_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Representation {
    Tempering,
    Rosinski,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Rosinski,
    Extended,
}

/// What a command produced: the payload and whether it reports a validation failure.
pub struct Outcome {
    pub payload: String,
    pub invalid: bool,
}

impl Outcome {
    fn ok(payload: String) -> Self {
        Outcome { payload, invalid: false }
    }
}

pub struct Diag {
    quiet: bool,
}

impl Diag {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn dispatch(command: Command, diag: &Diag) -> Result<Outcome, CliError> {
    use commands::*;
    match command {
        Command::Validate { spec } => validate(&spec),
        Command::Cf { spec, grid } => cf(&spec, &grid).map(Outcome::ok),
        Command::Transform { from, to, alpha, p, input } => {
            transform(from, to, alpha, p, &input).map(Outcome::ok)
        }
        Command::Approximate { spec, n } => approximate(&spec, n, diag).map(Outcome::ok),
        Command::Simulate { spec, paths, seed, tau, gaps } => {
            simulate(&spec, paths, seed, tau, gaps.as_deref(), diag).map(Outcome::ok)
        }
        Command::CheckLimit { sequence, target, epsilons, delta } => {
            check_limit(&sequence, &target, epsilons, delta, diag).map(Outcome::ok)
        }
        Command::Demo(Demo::GaussianLimit { common, a }) => {
            gaussian_demo(&common, &a, diag).map(Outcome::ok)
        }
        Command::Demo(Demo::StableLimit { common, sigma }) => {
            stable_demo(&common, &sigma, diag).map(Outcome::ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let diag = Diag { quiet: cli.quiet };
    let result = dispatch(cli.command, &diag).and_then(|outcome| {
        match &cli.out {
            Some(path) => std::fs::write(path, &outcome.payload)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{}", outcome.payload),
        }
        Ok(outcome.invalid)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            diag.note(format!("error: {e}"));
            ExitCode::from(e.code())
        }
    }
}
