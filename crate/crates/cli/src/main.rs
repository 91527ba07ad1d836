use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use spadlin_cli::{CommandName, RunOptions};

/// Monte Carlo experiments for SPAD linearization and histogram-less ranging.
#[derive(Debug, Parser)]
#[command(name = "spadlin", version)]
struct Cli {
    command: CommandName,
    /// JSON file whose keys override the default configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory [default: out/<command>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Start from the paper-scale configuration instead of the desk-scale one.
    #[arg(long)]
    paper_scale: bool,
    /// Exit with status 1 if any check fails.
    #[arg(long)]
    check: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<bool> {
    let config = cli
        .config
        .as_ref()
        .map(|p| -> Result<_> {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .transpose()?;
    let name = cli
        .command
        .to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default();
    let opts = RunOptions {
        config,
        seed: cli.seed,
        out: cli.out.unwrap_or_else(|| PathBuf::from("out").join(&name)),
        paper_scale: cli.paper_scale,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let outcome = pool.install(|| cli.command.execute(&opts))?;
    for c in &outcome.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", c.name, c.detail);
    }
    println!("outputs written to {}", opts.out.display());
    Ok(outcome.passed() || !cli.check)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
