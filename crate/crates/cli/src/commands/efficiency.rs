//! Cost of the two linearization schemes against background flux.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::detectors::{acquire_or_discard_run, time_gated_run, DetectorConfig, RunStats};
use spadlin::photon_model::{LaserPulse, SceneConfig};
use spadlin::rng::{stream_id, stream_rng};

use crate::util::{csv_bytes, log_crossing, logspace};
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Efficiency {
    pub lambda_b: Vec<f64>,
    pub t_acq: f64,
    /// Simulated runs per flux and scheme.
    pub runs: u32,
    /// Linearized windows averaged per frame.
    pub measurements: f64,
    pub fps: f64,
}

impl Default for Efficiency {
    fn default() -> Self {
        Efficiency {
            lambda_b: logspace(1e6, 1e8, 21),
            t_acq: 100e-9,
            runs: 200,
            measurements: 3e4,
            fps: 30.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub lambda_b: f64,
    pub aod_acquisitions: f64,
    pub aod_raw_detections: f64,
    pub aod_recorded: f64,
    pub tg_acquisitions: f64,
    pub tg_recorded: f64,
    /// Acquire-or-discard timestamps per time-gated acquisition.
    pub ratio: f64,
    pub aod_expected_acquisitions: f64,
    pub tg_expected_acquisitions: f64,
    /// Acquisition time for `measurements` runs, seconds.
    pub aod_time_s: f64,
    pub tg_time_s: f64,
    pub aod_meets_fps: bool,
    pub tg_meets_fps: bool,
}

fn per_run(stats: &RunStats, runs: u32) -> (f64, f64, f64) {
    let n = f64::from(runs);
    (
        stats.acquisitions_used as f64 / n,
        stats.raw_detections as f64 / n,
        stats.recorded as f64 / n,
    )
}

impl Experiment for Efficiency {
    const NAME: &'static str = "efficiency";

    fn paper() -> Self {
        Efficiency {
            runs: 1_000,
            ..Self::default()
        }
    }

    fn notes(&self) -> Vec<String> {
        vec![
            "laser cycle period equals t_acq; one acquisition per cycle".into(),
            "acquisition time excludes readout overheads".into(),
        ]
    }

    fn run(&self, seed: u64) -> Result<Outcome> {
        ensure!(!self.lambda_b.is_empty(), "flux grid must be non-empty");
        ensure!(self.runs >= 1, "runs must be at least 1");
        let budget = 1.0 / self.fps;
        let cfg = DetectorConfig::default();
        let rows: Vec<EfficiencyRow> = self
            .lambda_b
            .par_iter()
            .enumerate()
            .map(|(i, &lb)| {
                let scene =
                    SceneConfig::new(lb, LaserPulse::rectangular(1e-9, 0.0), 0.0, self.t_acq)?;
                let (mut aod, mut tg) = (RunStats::default(), RunStats::default());
                for r in 0..self.runs {
                    let mut rng = stream_rng(seed, stream_id(i as u32, r));
                    aod.merge(&acquire_or_discard_run(&scene, &cfg, &mut rng).stats);
                    tg.merge(&time_gated_run(&scene, &cfg, &mut rng).stats);
                }
                let (aa, ar, arec) = per_run(&aod, self.runs);
                let (ta, _, trec) = per_run(&tg, self.runs);
                let photons = lb * self.t_acq;
                let aod_time = aa * self.measurements * self.t_acq;
                let tg_time = ta * self.measurements * self.t_acq;
                Ok(EfficiencyRow {
                    lambda_b: lb,
                    aod_acquisitions: aa,
                    aod_raw_detections: ar,
                    aod_recorded: arec,
                    tg_acquisitions: ta,
                    tg_recorded: trec,
                    ratio: ar / ta,
                    aod_expected_acquisitions: photons.exp(),
                    tg_expected_acquisitions: photons + 1.0,
                    aod_time_s: aod_time,
                    tg_time_s: tg_time,
                    aod_meets_fps: aod_time <= budget,
                    tg_meets_fps: tg_time <= budget,
                })
            })
            .collect::<Result<_>>()?;

        let xs: Vec<f64> = rows.iter().map(|r| r.lambda_b).collect();
        let times: Vec<f64> = rows.iter().map(|r| r.aod_time_s).collect();
        let cutoff = log_crossing(&xs, &times, budget);
        let mut checks = Vec::new();
        if let Some(top) = rows.iter().find(|r| r.lambda_b == 1e8) {
            checks.push(Check::new(
                "ratio_at_1e8",
                top.ratio >= 1e3,
                format!(
                    "{:.0} raw detections vs {:.2} acquisitions per run, ratio {:.0}",
                    top.aod_raw_detections, top.tg_acquisitions, top.ratio
                ),
            ));
        }
        if let Some(low) = rows.iter().find(|r| r.lambda_b == 1e6) {
            checks.push(Check::new(
                "ratio_at_1e6",
                low.ratio < 10.0,
                format!("ratio {:.3}", low.ratio),
            ));
        }
        checks.push(Check::new(
            "aod_fps_cutoff",
            cutoff.is_some_and(|c| (1.2e7..=4.8e7).contains(&c)),
            match cutoff {
                Some(c) => format!("{c:.3e} events/s"),
                None => "acquisition time never crosses the frame budget".into(),
            },
        ));
        checks.push(Check::new(
            "tg_meets_fps_everywhere",
            rows.iter().all(|r| r.tg_meets_fps),
            format!(
                "worst {:.3} ms against {:.3} ms",
                1e3 * rows.iter().map(|r| r.tg_time_s).fold(0.0, f64::max),
                1e3 * budget
            ),
        ));
        Ok(Outcome {
            files: vec![("efficiency.csv".into(), csv_bytes(&rows)?)],
            results: json!({
                "frame_budget_s": budget,
                "aod_cutoff_lambda_b": cutoff,
            }),
            checks,
        })
    }
}
