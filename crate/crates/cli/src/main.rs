//! `alpha-rne`: solve, sweep, welfare and cross-check runs driven by a TOML
//! config. Exit codes: 0 success, 1 bad config or run error, 2 an empty
//! equilibrium set, 3 a cross-check mismatch.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{Options, Outcome};
use config::{Format, RunConfig};

/// Seed for random cross-check games when `--seed` is not given.
const DEFAULT_SEED: u64 = 20240611;

#[derive(Parser)]
#[command(name = "alpha-rne", version, about = "Equilibria of games with rational and herding players")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides `[output] format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; overrides `[output] path`. Stdout when neither is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random cross-check games.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Zero-scan grid for two-action runs, simplex resolution otherwise.
    #[arg(long, global = true)]
    grid: Option<u32>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// List the equilibria for each alpha.
    Solve,
    /// Utilities at each equilibrium and the welfare comparisons.
    Welfare,
    /// Long-format (alpha, z, tag) table for regime plots.
    Sweep,
    /// Compare the solver with a brute-force grid search.
    Crosscheck,
}

fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>)> {
    let path = cli.config.as_ref().context("--config is required")?;
    let cfg = RunConfig::load(path)?;
    let out = cli.out.clone().or_else(|| cfg.output.path.clone());
    let opts = Options {
        format: cli.format.unwrap_or(cfg.output.format),
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
        grid: cli.grid,
    };
    let outcome = match cli.command {
        Command::Solve => commands::solve(cfg, &opts)?,
        Command::Welfare => commands::welfare(cfg, &opts)?,
        Command::Sweep => commands::sweep(cfg, &opts)?,
        Command::Crosscheck => commands::crosscheck(cfg, &opts)?,
    };
    Ok((outcome, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, out) = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &out {
        Some(p) => std::fs::write(p, &outcome.text)
            .with_context(|| format!("cannot write {}", p.display())),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .context("cannot write to stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if matches!(cli.command, Command::Crosscheck) {
        if outcome.mismatches == 0 {
            eprintln!("all matched");
        } else {
            eprintln!("{} mismatches", outcome.mismatches);
            return ExitCode::from(3);
        }
    }
    if outcome.empty {
        eprintln!("empty equilibrium set");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
