//! Experiment harness behind the `spadlin` binary.
//!
//! Every experiment is a [`commands::Experiment`]: a JSON-configurable
//! struct whose `run` produces data files, a summary and a list of
//! pass/fail checks. [`execute`] resolves the configuration, runs the
//! experiment and writes everything to the output directory.

pub mod commands;
mod output;
mod util;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub use commands::{CommandName, Experiment};
pub use output::{Check, Outcome};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Parsed `--config` file, if any.
    pub config: Option<Value>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub paper_scale: bool,
}

/// Overlays the user's keys on the default configuration.
///
/// A top-level `seed` key is taken out and returned separately.
pub fn resolve_config<E: Experiment>(
    user: Option<&Value>,
    paper_scale: bool,
) -> Result<(E, Option<u64>)> {
    let base = if paper_scale { E::paper() } else { E::default() };
    let mut merged = serde_json::to_value(&base)?;
    let mut seed = None;
    if let Some(user) = user {
        let Value::Object(user) = user else {
            bail!("configuration must be a JSON object");
        };
        let Value::Object(target) = &mut merged else {
            unreachable!("experiment configurations serialize to objects");
        };
        for (k, v) in user {
            if k == "seed" {
                seed = Some(v.as_u64().context("seed must be a non-negative integer")?);
            } else {
                target.insert(k.clone(), v.clone());
            }
        }
    }
    let cfg = from_value(merged)?;
    Ok((cfg, seed))
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).context("invalid configuration")
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    paper_scale: bool,
    config: &'a C,
    notes: Vec<String>,
    files: Vec<&'a str>,
}

/// Runs `E` with `opts` and writes its outputs. Returns the outcome so that
/// the caller can act on failed checks.
pub fn execute<E: Experiment>(opts: &RunOptions) -> Result<Outcome> {
    let (cfg, cfg_seed) = resolve_config::<E>(opts.config.as_ref(), opts.paper_scale)?;
    let seed = opts.seed.or(cfg_seed).unwrap_or(DEFAULT_SEED);
    let outcome = cfg.run(seed)?;
    write_outputs(&opts.out, E::NAME, &cfg, seed, opts.paper_scale, &outcome)?;
    Ok(outcome)
}

fn write_outputs<E: Experiment>(
    dir: &Path,
    name: &str,
    cfg: &E,
    seed: u64,
    paper_scale: bool,
    outcome: &Outcome,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (file, bytes) in &outcome.files {
        std::fs::write(dir.join(file), bytes).with_context(|| format!("writing {file}"))?;
    }
    let manifest = Manifest {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        paper_scale,
        config: cfg,
        notes: cfg.notes(),
        files: outcome.files.iter().map(|(f, _)| f.as_str()).collect(),
    };
    std::fs::write(dir.join("manifest.json"), pretty(&manifest)?)?;
    std::fs::write(dir.join("summary.json"), pretty(&outcome.summary_json())?)?;
    Ok(())
}

fn pretty<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}
