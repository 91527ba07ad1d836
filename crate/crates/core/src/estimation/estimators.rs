use serde::{Deserialize, Serialize};

use super::AccumulatorState;
use crate::photon_model::{laser_mean_time, LaserPulse};
use crate::{Error, Result, TimePs};

/// Laser-source constants needed to turn a mean timestamp into a distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationData {
    /// Mean arrival time of laser photons relative to the pulse start, `t̄_l`.
    pub t_laser_mean: f64,
    /// Pulse duration `T_W`; bounds the range of valid estimates.
    pub pulse_width: f64,
}

impl CalibrationData {
    pub fn from_pulse(pulse: &LaserPulse) -> Result<Self> {
        Ok(CalibrationData {
            t_laser_mean: laser_mean_time(pulse)?,
            pulse_width: pulse.width,
        })
    }

    /// Calibrates `t̄_l` from a background-free run against a target at a
    /// known time of flight.
    pub fn from_timestamps(times: &[TimePs], known_tof: f64, pulse_width: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidConfig(
                "calibration needs at least one timestamp".into(),
            ));
        }
        let sum: u128 = times.iter().map(|t| u128::from(t.ps())).sum();
        let mean = sum as f64 / times.len() as f64 * 1e-12;
        Ok(CalibrationData {
            t_laser_mean: mean - known_tof,
            pulse_width,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToFEstimate {
    /// Estimated time of flight, seconds.
    pub tof: f64,
    /// `N_bg / N_tot`.
    pub alpha_hat: f64,
    /// False when the estimate falls outside `[0, T_acq - T_W]` or a
    /// register overflowed.
    pub valid: bool,
    pub n_bg: u64,
    pub n_tot: u64,
}

/// JSON form of a [`ToFEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToFRecord {
    pub tof_ps: f64,
    pub alpha_hat: f64,
    pub n_bg: u64,
    pub n_tot: u64,
    pub valid: bool,
}

impl ToFEstimate {
    pub fn record(&self) -> ToFRecord {
        ToFRecord {
            tof_ps: self.tof * 1e12,
            alpha_hat: self.alpha_hat,
            n_bg: self.n_bg,
            n_tot: self.n_tot,
            valid: self.valid,
        }
    }
}

fn finish(
    state: &AccumulatorState,
    tof: f64,
    calib: &CalibrationData,
    t_acq: f64,
) -> ToFEstimate {
    let in_range = (0.0..=t_acq - calib.pulse_width).contains(&tof);
    ToFEstimate {
        tof,
        alpha_hat: state.n_bg() as f64 / state.n_tot() as f64,
        valid: in_range && !state.overflow(),
        n_bg: state.n_bg(),
        n_tot: state.n_tot(),
    }
}

fn check_signal(state: &AccumulatorState) -> Result<()> {
    if state.n_tot() <= state.n_bg() {
        let alpha = if state.n_tot() == 0 {
            f64::INFINITY
        } else {
            state.n_bg() as f64 / state.n_tot() as f64
        };
        return Err(Error::NoSignal { alpha });
    }
    Ok(())
}

/// Time of flight from the two counters and the total-phase accumulator,
/// taking the background mean to be `T_acq / 2`:
///
/// `ToF = (N_tot·t̄_tot − N_bg·T_acq/2) / (N_tot − N_bg) − t̄_l`.
///
/// Both phases must span the same number of windows.
pub fn estimate_tof_simplified(
    state: &AccumulatorState,
    calib: &CalibrationData,
    t_acq: f64,
) -> Result<ToFEstimate> {
    check_signal(state)?;
    let sum_tot = state.sum_t_tot() as f64 * 1e-12;
    let n_bg = state.n_bg() as f64;
    let signal = state.n_tot() as f64 - n_bg;
    let tof = (sum_tot - n_bg * t_acq / 2.0) / signal - calib.t_laser_mean;
    Ok(finish(state, tof, calib, t_acq))
}

/// Like [`estimate_tof_simplified`] but uses the measured background mean
/// instead of `T_acq / 2`, which removes the bias of a non-uniform
/// background. Requires a state built with
/// [`with_background_sum`](AccumulatorState::with_background_sum).
pub fn estimate_tof_full(
    state: &AccumulatorState,
    calib: &CalibrationData,
    t_acq: f64,
) -> Result<ToFEstimate> {
    let sum_bg = state.sum_t_bg().ok_or_else(|| {
        Error::InvalidConfig("full estimator needs the background timestamp sum".into())
    })?;
    check_signal(state)?;
    let signal = (state.n_tot() - state.n_bg()) as f64;
    let diff = state.sum_t_tot() as f64 - sum_bg as f64;
    let tof = diff * 1e-12 / signal - calib.t_laser_mean;
    Ok(finish(state, tof, calib, t_acq))
}

/// Difference of mean timestamps with and without the laser.
///
/// Not an estimator of the time of flight on first-photon data: the result
/// depends non-linearly on the signal intensity as well.
pub fn naive_difference_estimate(t_bar_tot: f64, t_bar_bg: f64) -> f64 {
    t_bar_tot - t_bar_bg
}
