//! The experiments, one module each.

pub mod efficiency;
pub mod linearize_bg;
pub mod maxflux;
pub mod memory;
pub mod pileup;
pub mod range;
pub mod sweep;

use anyhow::Result;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::Outcome;

/// A configurable experiment. `Default` gives the desk-scale configuration.
pub trait Experiment: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;

    /// Full-scale configuration, selected by `--paper-scale`.
    fn paper() -> Self {
        Self::default()
    }

    /// Modelling assumptions recorded in the manifest.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }

    fn run(&self, seed: u64) -> Result<Outcome>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CommandName {
    Sweep,
    Efficiency,
    Pileup,
    Range,
    Memory,
    Maxflux,
    LinearizeBg,
}

impl CommandName {
    pub fn execute(self, opts: &crate::RunOptions) -> Result<Outcome> {
        match self {
            CommandName::Sweep => crate::execute::<sweep::Sweep>(opts),
            CommandName::Efficiency => crate::execute::<efficiency::Efficiency>(opts),
            CommandName::Pileup => crate::execute::<pileup::Pileup>(opts),
            CommandName::Range => crate::execute::<range::Range>(opts),
            CommandName::Memory => crate::execute::<memory::Memory>(opts),
            CommandName::Maxflux => crate::execute::<maxflux::MaxFlux>(opts),
            CommandName::LinearizeBg => crate::execute::<linearize_bg::LinearizeBg>(opts),
        }
    }
}
