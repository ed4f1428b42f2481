//! `chablab`: command-line experiments on piecewise-affine groups over `Q_p`,
//! block-permutation groups and finite-group saturation.
//!
//! Exit codes: 0 when every requested check passes, 1 when one fails, 2 for
//! malformed input or usage, 3 when a configured size bound is exceeded.

mod bp;
mod chab;
mod dyadic;
mod error;
mod eval;
mod gf;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::Failure;
use output::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "chablab",
    version,
    about = "Exact experiments on Chabauty-space saturation and PL groups"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate words over PL generators: canonical form, support, fixed points, membership.
    Eval(eval::Args),
    /// Subgroup lattice, saturation tables, URS/IRS listings and tower tables of a finite group.
    Chab(chab::Args),
    /// Membership, neighbourhood and truncation queries in G_F.
    Gf(gf::Args),
    /// The dyadic example: saturated H_n = 2^-n Z with non-saturated limit Z[1/2].
    Dyadic(dyadic::Args),
    /// Block-permutation elements: membership, quotients, parity corrections, splitting check.
    Bp(bp::Args),
}

#[derive(Clone, Debug)]
pub struct Context {
    pub format: Format,
    pub seed: u64,
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot configure {n} threads: {e}")))?;
    }
    let ctx = Context {
        format: cli.format,
        seed: cli.seed,
    };
    match cli.command {
        Command::Eval(args) => eval::run(&ctx, args),
        Command::Chab(args) => chab::run(&ctx, args),
        Command::Gf(args) => gf::run(&ctx, args),
        Command::Dyadic(args) => dyadic::run(&ctx, args),
        Command::Bp(args) => bp::run(&ctx, args),
    }
}

pub fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// A JSON file holding one value or a list of them.
pub fn read_one_or_many<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<Vec<T>, Failure> {
    let text = read_file(path)?;
    let parsed = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text)
    } else {
        serde_json::from_str(&text).map(|one| vec![one])
    };
    parsed.map_err(|e| Failure::from(e).in_file(path))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
