use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{estimate_tof_simplified, AccumulatorState, CalibrationData, Phase, ToFEstimate};
use crate::detectors::{acquire_window, DetectorConfig, RunStats, Scheme};
use crate::photon_model::SceneConfig;
use crate::Result;

/// How one estimate is acquired: `windows` linearized windows with the
/// laser off, then the same number with it on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhasePlan {
    pub scheme: Scheme,
    pub windows: u64,
    pub detector: DetectorConfig,
    pub counter_bits: u32,
}

impl TwoPhasePlan {
    pub fn new(scheme: Scheme, windows: u64) -> Self {
        TwoPhasePlan {
            scheme,
            windows,
            detector: DetectorConfig::default(),
            counter_bits: 16,
        }
    }

    pub fn with_detector(self, detector: DetectorConfig) -> Self {
        TwoPhasePlan { detector, ..self }
    }

    pub fn with_counter_bits(self, counter_bits: u32) -> Self {
        TwoPhasePlan {
            counter_bits,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseOutcome {
    pub state: AccumulatorState,
    pub background_cost: RunStats,
    pub total_cost: RunStats,
}

/// Runs both acquisition phases on `scene`.
pub fn run_two_phase<R: Rng + ?Sized>(
    plan: &TwoPhasePlan,
    scene: &SceneConfig,
    rng: &mut R,
) -> TwoPhaseOutcome {
    let mut state = AccumulatorState::new()
        .with_counter_bits(plan.counter_bits)
        .with_background_sum();
    let mut background_cost = RunStats::default();
    let mut total_cost = RunStats::default();
    let dark = scene.background_only();
    for _ in 0..plan.windows {
        let run = acquire_window(plan.scheme, &dark, &plan.detector, rng);
        state.accumulate(&run.times, Phase::Background);
        background_cost.merge(&run.stats);
    }
    for _ in 0..plan.windows {
        let run = acquire_window(plan.scheme, scene, &plan.detector, rng);
        state.accumulate(&run.times, Phase::Total);
        total_cost.merge(&run.stats);
    }
    TwoPhaseOutcome {
        state,
        background_cost,
        total_cost,
    }
}

/// Acquires both phases and applies the simplified estimator.
pub fn estimate_from_scene<R: Rng + ?Sized>(
    plan: &TwoPhasePlan,
    scene: &SceneConfig,
    calib: &CalibrationData,
    rng: &mut R,
) -> Result<ToFEstimate> {
    let outcome = run_two_phase(plan, scene, rng);
    estimate_tof_simplified(&outcome.state, calib, scene.t_acq())
}
