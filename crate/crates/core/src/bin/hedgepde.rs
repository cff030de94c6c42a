use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hedgepde::cli::{run, Command};
use hedgepde::config::load_config;
use hedgepde::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    SweepRho,
    McVerify,
    Converge,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Solve => Command::Solve,
            Cmd::SweepRho => Command::SweepRho,
            Cmd::McVerify => Command::McVerify,
            Cmd::Converge => Command::Converge,
        }
    }
}

/// Mean-square hedging of a payoff under a stochastic-volatility model.
///
/// Set HEDGEPDE_THREADS to cap the worker threads.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var("HEDGEPDE_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("HEDGEPDE_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    match threads() {
        Ok(Some(n)) => pool = pool.num_threads(n),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(args.command.into(), &config, &args.out)) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ (Error::Config { .. } | Error::InvalidParameter { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
