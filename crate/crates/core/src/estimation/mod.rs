//! Time-of-flight estimation from linearized timestamps.
//!
//! The estimator needs only a background count, a total count and the sum
//! of total-phase timestamps; see [`AccumulatorState`]. The histogram
//! estimators in this module exist as references.

mod accumulator;
mod estimators;
mod pipeline;
mod reference;
mod trials;

pub use accumulator::{AccumulatorState, Phase};
pub use estimators::{
    estimate_tof_full, estimate_tof_simplified, naive_difference_estimate, CalibrationData,
    ToFEstimate, ToFRecord,
};
pub use pipeline::{estimate_from_scene, run_two_phase, TwoPhaseOutcome, TwoPhasePlan};
pub use reference::{exponential_fit, peak_estimate, rate_from_linearized, ExpFit, PeakEstimate};
pub use trials::{accuracy_precision, TrialRecord, TrialStats};
