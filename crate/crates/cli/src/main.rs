use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pkit_cli::commands::{self, parse_complex, Settings};
use pkit_cli::problem::ProblemFile;
use pkit_cli::{fuzz, CliError, CliResult};
use pkit_core::C64;

/// Pontryagin-space realizations of generalized Nevanlinna functions.
#[derive(Parser)]
#[command(name = "pkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, inertia, minimality, index and injectivity facts.
    Inspect { file: PathBuf },
    /// Evaluate Q(z).
    Eval {
        file: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
    },
    /// Inverse function -Q(z)^-1 by the explicit formula, with its affine split.
    Invert {
        file: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Vec<C64>,
    },
    /// Split along a J-non-degenerate invariant subspace.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Jordan-chain decomposition at an eigenvalue and pole-cancellation check.
    Jordan {
        file: PathBuf,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: C64,
    },
    /// Check the invariants on random instances.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
    },
    /// Reproduce the four-dimensional worked example.
    Example1,
}

fn run(cli: Cli) -> CliResult<String> {
    let s = Settings::from_env()?;
    let load = |f: &PathBuf| ProblemFile::load(f);
    match cli.command {
        Command::Inspect { file } => commands::inspect(&load(&file)?, &s),
        Command::Eval { file, z } => commands::eval(&load(&file)?, z, &s),
        Command::Invert { file, z } => commands::invert(&load(&file)?, &z, &s),
        Command::Decompose { file, subspace } => commands::decompose(&load(&file)?, &subspace, &s),
        Command::Jordan { file, alpha } => commands::jordan(&load(&file)?, alpha, &s),
        Command::Fuzz {
            seed,
            count,
            max_dim,
        } => {
            let rep = fuzz::run(seed, count, max_dim);
            if rep.failed > 0 {
                print!("{}", rep.text);
                return Err(CliError::FuzzFailed(rep.failed));
            }
            Ok(rep.text)
        }
        Command::Example1 => commands::example1_report(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; help and version succeed
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
