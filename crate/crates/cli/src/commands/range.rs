//! Accuracy and precision of repeated estimates against target distance.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::detectors::Scheme;
use spadlin::estimation::{
    accuracy_precision, estimate_from_scene, CalibrationData, ToFEstimate, TrialRecord,
    TwoPhasePlan,
};
use spadlin::photon_model::{tof_for_distance, LaserPulse, SceneConfig};
use spadlin::rng::{stream_id, stream_rng};
use spadlin::Error;

use crate::util::csv_bytes;
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Range {
    /// Target distances, metres.
    pub distances: Vec<f64>,
    pub lambda_b: Vec<f64>,
    pub trials: u32,
    /// Windows per phase and estimate.
    pub windows: u64,
    pub scheme: Scheme,
    pub t_acq: f64,
    pub pulse_width: f64,
    /// Signal photons per window for a target at 1 m; falls off as 1/d².
    pub photons_at_1m: f64,
    pub counter_bits: u32,
}

impl Default for Range {
    fn default() -> Self {
        Range {
            distances: vec![1.0, 2.0, 3.0, 3.8],
            lambda_b: vec![0.0, 7.7e6, 1.2e8],
            trials: 250,
            windows: 15_000,
            scheme: Scheme::TimeGated,
            t_acq: 100e-9,
            pulse_width: 4e-9,
            photons_at_1m: 3.0,
            counter_bits: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeRow {
    pub distance_m: f64,
    pub lambda_b: f64,
    pub tof_ps: f64,
    pub signal_photons: f64,
    pub mean_error_ps: f64,
    pub std_ps: f64,
    pub rel_accuracy: f64,
    pub rel_precision: f64,
    pub trials: usize,
    pub invalid: usize,
}

impl Range {
    fn cell(&self, index: u32, distance: f64, lambda_b: f64, seed: u64) -> Result<RangeRow> {
        let tof = tof_for_distance(distance);
        let photons = self.photons_at_1m / (distance * distance);
        let pulse = LaserPulse::rectangular(self.pulse_width, photons);
        let scene = SceneConfig::new(lambda_b, pulse, tof, self.t_acq)?;
        let calib = CalibrationData::from_pulse(&pulse)?;
        let plan = TwoPhasePlan::new(self.scheme, self.windows).with_counter_bits(self.counter_bits);
        let estimates: Vec<ToFEstimate> = (0..self.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = stream_rng(seed, stream_id(index, trial));
                match estimate_from_scene(&plan, &scene, &calib, &mut rng) {
                    // Counted as an invalid trial rather than aborting the cell.
                    Err(Error::NoSignal { alpha }) => Ok(ToFEstimate {
                        tof: f64::NAN,
                        alpha_hat: alpha,
                        valid: false,
                        n_bg: 0,
                        n_tot: 0,
                    }),
                    other => other,
                }
            })
            .collect::<spadlin::Result<_>>()?;
        let stats = accuracy_precision(&estimates, tof)?;
        let TrialRecord {
            mean_error_ps,
            std_ps,
            rel_accuracy,
            rel_precision,
            trials,
        } = stats.record();
        Ok(RangeRow {
            distance_m: distance,
            lambda_b,
            tof_ps: tof * 1e12,
            signal_photons: photons,
            mean_error_ps,
            std_ps,
            rel_accuracy,
            rel_precision,
            trials,
            invalid: stats.invalid,
        })
    }
}

impl Experiment for Range {
    const NAME: &'static str = "range";

    fn paper() -> Self {
        Range {
            distances: (0..=14).map(|i| 1.0 + 0.2 * f64::from(i)).collect(),
            ..Self::default()
        }
    }

    fn notes(&self) -> Vec<String> {
        vec![
            "synthetic analogue of measured curves; signal photons scale as 1/d^2".into(),
            "precision is the sample standard deviation of the estimates".into(),
        ]
    }

    fn run(&self, seed: u64) -> Result<Outcome> {
        ensure!(self.trials >= 2, "need at least two trials");
        ensure!(
            self.distances.iter().all(|&d| d > 0.0
                && tof_for_distance(d) + self.pulse_width <= self.t_acq),
            "every distance must keep the echo inside the window"
        );
        let mut rows = Vec::new();
        for (j, &lb) in self.lambda_b.iter().enumerate() {
            for (i, &d) in self.distances.iter().enumerate() {
                let index = (j * self.distances.len() + i) as u32;
                rows.push(self.cell(index, d, lb, seed)?);
            }
        }

        let at = |lb: f64| rows.iter().filter(move |r| r.lambda_b == lb);
        let mut checks = vec![Check::new(
            "tof_at_3_8_m",
            (tof_for_distance(3.8) * 1e12 - 25_350.0).abs() < 1.0,
            format!("{:.1} ps", tof_for_distance(3.8) * 1e12),
        )];
        if at(0.0).next().is_some() {
            let worst_acc = at(0.0).map(|r| r.rel_accuracy.abs()).fold(0.0, f64::max);
            let worst_prec = at(0.0).map(|r| r.rel_precision).fold(0.0, f64::max);
            checks.push(Check::new(
                "no_background_accuracy_precision",
                worst_acc < 0.005 && worst_prec < 0.0025,
                format!("worst |accuracy| {worst_acc:.5}, worst precision {worst_prec:.5}"),
            ));
        }
        if at(7.7e6).next().is_some() {
            let worst = at(7.7e6).map(|r| r.rel_precision).fold(0.0, f64::max);
            checks.push(Check::new(
                "moderate_background_worst_precision",
                (0.03..=0.12).contains(&worst),
                format!("worst precision {:.2}%", 100.0 * worst),
            ));
        }
        Ok(Outcome {
            files: vec![("range.csv".into(), csv_bytes(&rows)?)],
            results: json!({ "cells": rows }),
            checks,
        })
    }
}
