//! Histogram-less estimate over a grid of background and signal rates.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::detectors::Scheme;
use spadlin::estimation::{estimate_from_scene, CalibrationData, TwoPhasePlan};
use spadlin::photon_model::{LaserPulse, SceneConfig};
use spadlin::rng::stream_rng;
use spadlin::Error;

use crate::util::{csv_bytes, logspace};
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    /// Background rates, events/s.
    pub lambda_b: Vec<f64>,
    /// Laser rates while the pulse is on, events/s.
    pub lambda_s: Vec<f64>,
    pub tof: f64,
    pub pulse_width: f64,
    pub t_acq: f64,
    /// Windows per phase and cell.
    pub windows: u64,
    pub scheme: Scheme,
    pub counter_bits: u32,
    /// Relative error within which a cell counts as recovered.
    pub tolerance: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            lambda_b: logspace(1e5, 1e9, 5),
            lambda_s: logspace(1e6, 1e8, 5),
            tof: 25e-9,
            pulse_width: 4e-9,
            t_acq: 100e-9,
            windows: 1_000,
            scheme: Scheme::Ideal,
            // 16-bit counters overflow at the top of the background range.
            counter_bits: 32,
            tolerance: 0.05,
        }
    }
}

impl Sweep {
    /// Minimum signal photons per window for a cell to be expected to
    /// succeed: `10·λ_B·T_acq / sqrt(windows)`.
    pub fn required_signal(&self, lambda_b: f64) -> f64 {
        10.0 * lambda_b * self.t_acq / (self.windows as f64).sqrt()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda_b: f64,
    pub lambda_s: f64,
    pub background_photons: f64,
    pub signal_photons: f64,
    pub tof_hat_ps: f64,
    pub rel_error: f64,
    pub alpha_hat: f64,
    pub valid: bool,
    /// The cell meets the signal threshold of [`Sweep::required_signal`].
    pub required: bool,
    pub recovered: bool,
}

impl Experiment for Sweep {
    const NAME: &'static str = "sweep";

    fn paper() -> Self {
        Sweep {
            windows: 10_000,
            ..Self::default()
        }
    }

    fn run(&self, seed: u64) -> Result<Outcome> {
        ensure!(
            !self.lambda_b.is_empty() && !self.lambda_s.is_empty(),
            "sweep grids must be non-empty"
        );
        ensure!(self.windows >= 1, "windows must be at least 1");
        let cells: Vec<(f64, f64)> = self
            .lambda_b
            .iter()
            .flat_map(|&b| self.lambda_s.iter().map(move |&s| (b, s)))
            .collect();
        let plan = TwoPhasePlan::new(self.scheme, self.windows).with_counter_bits(self.counter_bits);
        let rows = cells
            .par_iter()
            .enumerate()
            .map(|(i, &(lb, ls))| self.cell(&plan, lb, ls, seed, i as u64))
            .collect::<Result<Vec<_>>>()?;

        let required: Vec<&SweepRow> = rows.iter().filter(|r| r.required).collect();
        let failed: Vec<String> = required
            .iter()
            .filter(|r| !r.recovered)
            .map(|r| format!("({:.0e}, {:.2e})", r.lambda_b, r.lambda_s))
            .collect();
        let mut checks = vec![
            Check::new(
                "required_cells_recovered",
                failed.is_empty(),
                format!(
                    "{}/{} cells above the signal threshold within {}%; failing (λ_B, λ_S): [{}]",
                    required.len() - failed.len(),
                    required.len(),
                    100.0 * self.tolerance,
                    failed.join(", ")
                ),
            ),
            Check::new(
                "grid_complete",
                rows.len() == self.lambda_b.len() * self.lambda_s.len(),
                format!("{} rows", rows.len()),
            ),
        ];
        if let Some(r) = rows
            .iter()
            .find(|r| r.lambda_b == 1e5 && r.lambda_s == 1e8)
        {
            checks.push(Check::new(
                "high_snr_cell",
                r.rel_error.abs() <= 0.02,
                format!("λ_B=1e5, λ_S=1e8: {:.1} ps ({:+.3}%)", r.tof_hat_ps, 100.0 * r.rel_error),
            ));
        }
        let recovered = rows.iter().filter(|r| r.recovered).count();
        Ok(Outcome {
            files: vec![("sweep.csv".into(), csv_bytes(&rows)?)],
            results: json!({
                "cells": rows.len(),
                "recovered": recovered,
                "required": required.len(),
                "required_recovered": required.len() - failed.len(),
            }),
            checks,
        })
    }
}

impl Sweep {
    fn cell(&self, plan: &TwoPhasePlan, lb: f64, ls: f64, seed: u64, index: u64) -> Result<SweepRow> {
        let pulse = LaserPulse::rectangular_rate(self.pulse_width, ls);
        let scene = SceneConfig::new(lb, pulse, self.tof, self.t_acq)?;
        let mut rng = stream_rng(seed, index);
        let calib = CalibrationData {
            t_laser_mean: self.pulse_width / 2.0,
            pulse_width: self.pulse_width,
        };
        // Without a laser there is no time of flight to report, whatever the
        // counters happen to say.
        let estimate = if pulse.mean_photons > 0.0 {
            estimate_from_scene(plan, &scene, &calib, &mut rng)
        } else {
            Err(Error::NoSignal { alpha: 1.0 })
        };
        let (tof, alpha_hat, valid) = match estimate {
            Ok(e) => (e.tof, e.alpha_hat, e.valid),
            Err(Error::NoSignal { alpha }) => (f64::NAN, alpha, false),
            Err(e) => return Err(e.into()),
        };
        let rel_error = tof / self.tof - 1.0;
        Ok(SweepRow {
            lambda_b: lb,
            lambda_s: ls,
            background_photons: scene.background_photons(),
            signal_photons: pulse.mean_photons,
            tof_hat_ps: tof * 1e12,
            rel_error,
            alpha_hat,
            valid,
            required: pulse.mean_photons >= self.required_signal(lb),
            recovered: rel_error.abs() <= self.tolerance,
        })
    }
}
