//! Detector and acquisition-scheme emulation.

mod config;
mod histogram;
mod replay;
mod schemes;

pub use config::DetectorConfig;
pub use histogram::{
    build_histogram, read_timestamps, replay_histogram, write_timestamps, Histogram,
};
pub use replay::{
    acquire_or_discard_from_timestamps, cumulative_sum_linearize, ReplayOptions, ReplayOutcome,
};
pub use schemes::{
    acquire_or_discard_run, acquire_window, detect_first_photon, ideal_run, sample_first_photon,
    time_gated_run, LinearizedRun, RunEnd, RunStats, Scheme,
};
