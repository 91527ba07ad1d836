//! Acquisition schemes.
//!
//! Each laser cycle gives the SPAD one fresh realization of the photon
//! stream, of which a classic front end reports only the earliest photon.
//! The two linearization schemes recover the full stream of a single window
//! from many such cycles:
//!
//! * **acquire-or-discard** keeps the first photon of a cycle only if it is
//!   later than everything recorded so far in the run;
//! * **time-gated** arms the SPAD only after the last recorded timestamp, so
//!   every cycle that sees a photon contributes one.
//!
//! In both cases a cycle that sees nothing in the remaining part of the
//! window ends the run, and the recorded timestamps are distributed exactly
//! as the arrivals of one window seen by a detector without dead time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DetectorConfig;
use crate::photon_model::{sample_first_arrival, sample_photon_stream, PhotonStream, SceneConfig};
use crate::TimePs;

/// Cost accounting of one linearized run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Laser cycles consumed, including the final empty one.
    pub acquisitions_used: u64,
    /// Cycles in which the SPAD reported a photon.
    pub raw_detections: u64,
    /// Timestamps kept in the run.
    pub recorded: u64,
}

impl RunStats {
    pub fn merge(&mut self, other: &RunStats) {
        self.acquisitions_used += other.acquisitions_used;
        self.raw_detections += other.raw_detections;
        self.recorded += other.recorded;
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunEnd {
    /// An acquisition saw no photon in the rest of the window.
    WindowExhausted,
    /// A recorded first arrival fell past the linearization horizon, which
    /// stands in for an empty acquisition.
    Horizon,
    /// The last recorded timestamp reached the final TDC bin before the
    /// horizon; no later timestamp can follow.
    Covered,
    /// Too many consecutive candidates were discarded.
    DiscardLimit,
    /// The input ran out mid-run.
    Incomplete,
}

/// Timestamps emulating one window of a dead-time-free detector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizedRun {
    /// Strictly increasing for the linearization schemes. The ideal detector
    /// with TDC quantization may report equal timestamps.
    pub times: Vec<TimePs>,
    pub stats: RunStats,
    pub end: RunEnd,
}

impl LinearizedRun {
    pub fn is_complete(&self) -> bool {
        self.end != RunEnd::Incomplete
    }
}

/// Which detector produces the timestamps of one window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Dead-time-free detector: reports the whole stream in one cycle.
    Ideal,
    AcquireOrDiscard,
    TimeGated,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ideal => "ideal",
            Scheme::AcquireOrDiscard => "acquire_or_discard",
            Scheme::TimeGated => "time_gated",
        }
    }
}

/// First photon of an already sampled stream, as a classic SPAD reports it.
pub fn detect_first_photon(stream: &PhotonStream, cfg: &DetectorConfig) -> Option<TimePs> {
    stream.first().map(|t| cfg.detect(t))
}

/// One laser cycle of a classic first-photon SPAD.
pub fn sample_first_photon<R: Rng + ?Sized>(
    scene: &SceneConfig,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> Option<TimePs> {
    sample_first_arrival(scene, None, rng).map(|t| cfg.detect(TimePs::from_seconds(t)))
}

pub fn ideal_run<R: Rng + ?Sized>(
    scene: &SceneConfig,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> LinearizedRun {
    let stream = sample_photon_stream(scene, rng);
    let times: Vec<TimePs> = stream.times.iter().map(|&t| cfg.detect(t)).collect();
    let n = times.len() as u64;
    LinearizedRun {
        times,
        stats: RunStats {
            acquisitions_used: 1,
            raw_detections: n,
            recorded: n,
        },
        end: RunEnd::WindowExhausted,
    }
}

pub fn acquire_or_discard_run<R: Rng + ?Sized>(
    scene: &SceneConfig,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> LinearizedRun {
    let mut times = Vec::new();
    let mut stats = RunStats::default();
    // No maximum yet: the first timestamp of a run is always kept.
    let mut latest: Option<TimePs> = None;
    loop {
        stats.acquisitions_used += 1;
        let Some(t) = sample_first_photon(scene, cfg, rng) else {
            break;
        };
        stats.raw_detections += 1;
        if latest.is_none_or(|m| t > m) {
            times.push(t);
            latest = Some(t);
        }
    }
    stats.recorded = times.len() as u64;
    LinearizedRun {
        times,
        stats,
        end: RunEnd::WindowExhausted,
    }
}

pub fn time_gated_run<R: Rng + ?Sized>(
    scene: &SceneConfig,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> LinearizedRun {
    let limit = TimePs::from_seconds(scene.t_acq());
    let mut times: Vec<TimePs> = Vec::new();
    let mut stats = RunStats::default();
    let mut gate: Option<f64> = None;
    loop {
        stats.acquisitions_used += 1;
        let Some(t) = sample_first_arrival(scene, gate, rng) else {
            break;
        };
        let mut t = cfg.detect(TimePs::from_seconds(t));
        if let Some(&prev) = times.last() {
            // Picosecond rounding can land on the gate itself.
            if t <= prev {
                t = TimePs(prev.ps() + 1);
            }
            if t > limit {
                break;
            }
        }
        stats.raw_detections += 1;
        times.push(t);
        gate = Some(cfg.gate_after(t));
    }
    stats.recorded = times.len() as u64;
    LinearizedRun {
        times,
        stats,
        end: RunEnd::WindowExhausted,
    }
}

/// Produces one window of timestamps with the chosen scheme.
pub fn acquire_window<R: Rng + ?Sized>(
    scheme: Scheme,
    scene: &SceneConfig,
    cfg: &DetectorConfig,
    rng: &mut R,
) -> LinearizedRun {
    match scheme {
        Scheme::Ideal => ideal_run(scene, cfg, rng),
        Scheme::AcquireOrDiscard => acquire_or_discard_run(scene, cfg, rng),
        Scheme::TimeGated => time_gated_run(scene, cfg, rng),
    }
}
