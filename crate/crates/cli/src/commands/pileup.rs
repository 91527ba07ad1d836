//! Pile-up distortion of first-photon histograms and its removal.

use anyhow::{ensure, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::detectors::{
    acquire_or_discard_run, build_histogram, sample_first_photon, DetectorConfig, Histogram,
};
use spadlin::photon_model::{
    linear_cdf, photons_for_detection_rate, LaserPulse, SceneConfig,
};
use spadlin::rng::{stream_id, stream_rng};
use spadlin::stats::{chi_square_gof, ks_critical_value, ks_p_value, ks_statistic};
use spadlin::TimePs;

use crate::{Check, Experiment, Outcome};

const CHUNK: u32 = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pileup {
    /// Probability that a cycle reports a laser photon.
    pub detection_rate: f64,
    /// Detection rate of the control scene where pile-up is negligible.
    pub low_detection_rate: f64,
    pub lambda_b: f64,
    pub tof: f64,
    pub t_acq: f64,
    pub pulse_width: f64,
    /// Gaussian centre and spread within the pulse, seconds.
    pub pulse_center: f64,
    pub pulse_sigma: f64,
    /// Linearized runs, acquire-or-discard.
    pub runs: u32,
    /// First-photon laser cycles.
    pub cycles: u32,
    pub bin_width: f64,
    /// Significance level of both goodness-of-fit tests.
    pub alpha: f64,
    /// First-photon p-value below which pile-up counts as detected.
    pub reject_p: f64,
}

impl Default for Pileup {
    fn default() -> Self {
        Pileup {
            detection_rate: 0.9,
            low_detection_rate: 0.05,
            lambda_b: 1e6,
            tof: 25e-9,
            t_acq: 100e-9,
            pulse_width: 4e-9,
            pulse_center: 1.5e-9,
            pulse_sigma: 0.5e-9,
            runs: 40_000,
            cycles: 100_000,
            bin_width: 100e-12,
            alpha: 0.01,
            reject_p: 1e-6,
        }
    }
}

/// Goodness of fit of timestamps inside the pulse against the linear law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub samples: usize,
    pub chi_square: f64,
    pub dof: usize,
    pub chi_square_p: f64,
    pub ks: f64,
    pub ks_critical: f64,
    pub ks_p: f64,
}

impl FitReport {
    fn consistent(&self, alpha: f64) -> bool {
        self.chi_square_p > alpha && self.ks < self.ks_critical
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneReport {
    pub detection_rate: f64,
    pub mean_photons: f64,
    pub first_photon: FitReport,
    pub linearized: FitReport,
}

impl Pileup {
    fn scene(&self, detection_rate: f64) -> Result<SceneConfig> {
        let pulse = LaserPulse::truncated_gaussian(
            self.pulse_width,
            photons_for_detection_rate(detection_rate),
            self.pulse_center,
            self.pulse_sigma,
        );
        Ok(SceneConfig::new(self.lambda_b, pulse, self.tof, self.t_acq)?)
    }

    fn bins(&self) -> usize {
        (self.t_acq / self.bin_width).round() as usize + 1
    }

    fn fit(&self, scene: &SceneConfig, times: &[TimePs], h: &Histogram) -> Result<FitReport> {
        let (a, b) = (self.tof, self.tof + self.pulse_width);
        let (fa, fb) = (linear_cdf(scene, a)?, linear_cdf(scene, b)?);
        let conditional = |t: f64| ((linear_cdf(scene, t).unwrap_or(0.0) - fa) / (fb - fa)).clamp(0.0, 1.0);

        let region = h.bins_in(a, b);
        let mut observed = Vec::with_capacity(region.len());
        let mut probs = Vec::with_capacity(region.len());
        for i in region {
            let lo = h.bin_start(i).as_seconds().max(a);
            let hi = h.bin_start(i + 1).as_seconds().min(b);
            observed.push(u64::from(h.counts()[i]));
            probs.push(conditional(hi) - conditional(lo));
        }
        let chi = chi_square_gof(&observed, &probs);

        let mut inside: Vec<f64> = times
            .iter()
            .map(|t| t.as_seconds())
            .filter(|&t| t >= a && t < b)
            .collect();
        inside.sort_by(f64::total_cmp);
        let n = inside.len();
        ensure!(n >= 2, "fewer than two timestamps inside the pulse");
        let ks = ks_statistic(&inside, conditional);
        Ok(FitReport {
            samples: n,
            chi_square: chi.statistic,
            dof: chi.dof,
            chi_square_p: chi.p_value,
            ks,
            ks_critical: ks_critical_value(n, self.alpha),
            ks_p: ks_p_value(ks, n),
        })
    }

    fn first_photon_times(&self, scene: &SceneConfig, seed: u64, tag: u32) -> Vec<TimePs> {
        let cfg = DetectorConfig::default();
        let chunks = self.cycles.div_ceil(CHUNK);
        let per_chunk: Vec<Vec<TimePs>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, stream_id(tag, c));
                let n = CHUNK.min(self.cycles - c * CHUNK);
                (0..n)
                    .filter_map(|_| sample_first_photon(scene, &cfg, &mut rng))
                    .collect()
            })
            .collect();
        per_chunk.concat()
    }

    fn linearized_times(&self, scene: &SceneConfig, seed: u64, tag: u32) -> Vec<TimePs> {
        let cfg = DetectorConfig::default();
        let chunks = self.runs.div_ceil(CHUNK);
        let per_chunk: Vec<Vec<TimePs>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(seed, stream_id(tag, c));
                let n = CHUNK.min(self.runs - c * CHUNK);
                (0..n)
                    .flat_map(|_| acquire_or_discard_run(scene, &cfg, &mut rng).times)
                    .collect()
            })
            .collect();
        per_chunk.concat()
    }

    fn analyse(
        &self,
        detection_rate: f64,
        seed: u64,
        tag: u32,
    ) -> Result<(SceneReport, Histogram, Histogram)> {
        let scene = self.scene(detection_rate)?;
        let first = self.first_photon_times(&scene, seed, 2 * tag);
        let linear = self.linearized_times(&scene, seed, 2 * tag + 1);
        let h_first = build_histogram(&first, self.bin_width, Some(self.bins()), None)?;
        let h_linear = build_histogram(&linear, self.bin_width, Some(self.bins()), None)?;
        let report = SceneReport {
            detection_rate,
            mean_photons: scene.pulse().mean_photons,
            first_photon: self.fit(&scene, &first, &h_first)?,
            linearized: self.fit(&scene, &linear, &h_linear)?,
        };
        Ok((report, h_first, h_linear))
    }
}

fn histogram_csv(h: &Histogram) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    h.write_csv(&mut buf)?;
    Ok(buf)
}

impl Experiment for Pileup {
    const NAME: &'static str = "pileup";

    fn paper() -> Self {
        Pileup {
            runs: 400_000,
            cycles: 1_000_000,
            ..Self::default()
        }
    }

    fn notes(&self) -> Vec<String> {
        vec![
            "goodness of fit is evaluated on timestamps inside the pulse, conditioned on that interval".into(),
            "the pulse is a gaussian truncated to its width".into(),
        ]
    }

    fn run(&self, seed: u64) -> Result<Outcome> {
        ensure!(self.runs >= 1 && self.cycles >= 1, "runs and cycles must be positive");
        ensure!(
            self.tof + self.pulse_width <= self.t_acq,
            "the pulse must end inside the window"
        );
        let (high, h_first, h_linear) = self.analyse(self.detection_rate, seed, 0)?;
        let (low, _, _) = self.analyse(self.low_detection_rate, seed, 1)?;

        let checks = vec![
            Check::new(
                "linearized_matches_linear_law",
                high.linearized.consistent(self.alpha),
                format!(
                    "chi-square p = {:.3}, KS {:.4} against critical {:.4}",
                    high.linearized.chi_square_p, high.linearized.ks, high.linearized.ks_critical
                ),
            ),
            Check::new(
                "first_photon_rejected",
                high.first_photon.chi_square_p < self.reject_p,
                format!("chi-square p = {:.3e}", high.first_photon.chi_square_p),
            ),
            Check::new(
                "low_rate_both_consistent",
                low.first_photon.consistent(self.alpha) && low.linearized.consistent(self.alpha),
                format!(
                    "first-photon p = {:.3}, linearized p = {:.3}",
                    low.first_photon.chi_square_p, low.linearized.chi_square_p
                ),
            ),
        ];
        Ok(Outcome {
            files: vec![
                ("first_photon_histogram.csv".into(), histogram_csv(&h_first)?),
                ("linearized_histogram.csv".into(), histogram_csv(&h_linear)?),
            ],
            results: json!({ "high_rate": high, "low_rate": low }),
            checks,
        })
    }
}
