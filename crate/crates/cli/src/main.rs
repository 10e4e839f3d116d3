//! `upadic`: slopes, eigenfunctions and spectral expansions of the `U`
//! operator from the command line.
//!
//! Exit status is 0 on success, 1 when a computation or verification fails
//! and 2 for usage or configuration errors.

mod commands;
mod config;
mod render;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "upadic", version, about = "Exact spectral computations for the U operator in weight 0")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// One of 2, 3, 5, 7, 13.
    #[arg(long, short, global = true, default_value_t = 5)]
    prime: u32,
    /// Matrix size n; each command has its own default.
    #[arg(long, short = 'n', global = true)]
    size: Option<usize>,
    /// Working p-adic precision (absolute, in powers of p).
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// q-adic precision for the direct matrix solve, or the order for the
    /// identity suite.
    #[arg(long, global = true)]
    qprec: Option<i64>,
    /// Overconvergence radius as `a/b`.
    #[arg(long, short, global = true)]
    radius: Option<String>,
    #[arg(long, short, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Directory for cached U-matrices.
    #[arg(long, global = true, env = upadic::cache::CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    /// `p^a×b` typography at 10 significant p-adic digits.
    #[value(alias = "paper")]
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// H_p, I_p and the recurrence kernel M.
    Hauptmodul,
    /// Slopes of U read off the characteristic series.
    Slopes {
        /// Number of slopes; defaults to all that have stabilized.
        #[arg(long, short)]
        count: Option<usize>,
    },
    /// Finite-slope eigenfunctions and their q-expansions.
    Eigen {
        #[arg(long, short, default_value_t = 20)]
        count: usize,
        /// Print the q-expansion of one eigenfunction, lifted to a rational
        /// series, in the dump format read by `spectral --input`.
        #[arg(long, value_name = "K")]
        dump_phi: Option<usize>,
    },
    /// Spectral coefficients c_j = <h, φ_j>/<φ_j, φ_j>.
    Spectral {
        /// `inverse-j` or a q-series dump file.
        #[arg(long, short, default_value = "inverse-j")]
        input: String,
        #[arg(long, short, default_value_t = 10)]
        count: usize,
    },
    /// Run verification suites; all of them by default.
    Verify {
        #[arg(long, value_enum)]
        suite: Vec<verify::Suite>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_args(&cli.global).and_then(|cfg| match &cli.command {
        Command::Hauptmodul => commands::hauptmodul(&cfg),
        Command::Slopes { count } => commands::slopes(&cfg, *count),
        Command::Eigen { count, dump_phi } => commands::eigen(&cfg, *count, *dump_phi),
        Command::Spectral { input, count } => commands::spectral(&cfg, input, *count),
        Command::Verify { suite } => verify::run(&cfg, suite),
    });
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("upadic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
