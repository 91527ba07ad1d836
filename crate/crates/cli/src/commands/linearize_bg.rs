//! Background-only linearization of first-arrival data by cumulative sums.

use anyhow::{ensure, Result};
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::detectors::{build_histogram, cumulative_sum_linearize};
use spadlin::estimation::{exponential_fit, rate_from_linearized};
use spadlin::rng::{stream_id, stream_rng};
use spadlin::TimePs;

use crate::util::{csv_bytes, mean_std};
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearizeBg {
    /// Background fluxes, events/s.
    pub lambda_b: Vec<f64>,
    /// First-arrival timestamps per flux.
    pub timestamps: u64,
    pub subsets: u32,
    pub t_acq: f64,
    pub bin_width: f64,
    /// Allowed relative deviation of the full-dataset estimate.
    pub tolerance: f64,
    /// Allowed relative deviation of every subset estimate.
    pub subset_tolerance: f64,
}

impl Default for LinearizeBg {
    fn default() -> Self {
        LinearizeBg {
            lambda_b: vec![6.5e6, 2e7, 6e7, 1.33e8],
            timestamps: 1_000_000,
            subsets: 200,
            t_acq: 100e-9,
            bin_width: 100e-12,
            tolerance: 0.01,
            subset_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxRow {
    pub lambda_b: f64,
    pub detections_per_window: f64,
    /// Detections per window as a multiple of the 5% pile-up rule.
    pub multiple_of_5pct_rule: f64,
    pub lambda_fit: f64,
    pub lambda_lin: f64,
    pub deviation_vs_fit: f64,
    pub deviation_vs_truth: f64,
    pub windows: u64,
    pub subset_mean_deviation: f64,
    pub subset_std_deviation: f64,
    pub subset_min_deviation: f64,
    pub subset_max_deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetRow {
    pub lambda_b: f64,
    pub subset: u32,
    pub lambda_fit: f64,
    pub lambda_lin: f64,
    pub deviation: f64,
}

struct Recovery {
    fit: f64,
    lin: f64,
    windows: u64,
}

impl LinearizeBg {
    /// Fits the original histogram and linearizes the same data.
    fn recover(&self, gaps: &[TimePs]) -> Result<Recovery> {
        let original = build_histogram(gaps, self.bin_width, None, None)?;
        let span = original.range_ps() as f64 * 1e-12;
        let fit = exponential_fit(&original, (0.0, span))?.rate;

        let runs: Vec<_> = cumulative_sum_linearize(gaps, self.t_acq)
            .into_iter()
            .filter(|r| r.is_complete())
            .collect();
        let windows = runs.len() as u64;
        ensure!(windows > 0, "data too short to close a single window");
        let times: Vec<TimePs> = runs.into_iter().flat_map(|r| r.times).collect();
        let bins = (self.t_acq / self.bin_width).round() as usize;
        let h = build_histogram(&times, self.bin_width, Some(bins + 1), None)?;
        let lin = rate_from_linearized(&h, (0.0, bins as f64 * self.bin_width), windows)?;
        Ok(Recovery { fit, lin, windows })
    }
}

impl Experiment for LinearizeBg {
    const NAME: &'static str = "linearize-bg";

    fn paper() -> Self {
        LinearizeBg {
            timestamps: 8_000_000,
            tolerance: 0.005,
            subset_tolerance: 0.005,
            ..Self::default()
        }
    }

    fn notes(&self) -> Vec<String> {
        vec![
            "first arrivals are untruncated exponential draws quantized to 1 ps".into(),
            "each subset is compared with the exponential fit of its own original histogram".into(),
        ]
    }

    fn run(&self, seed: u64) -> Result<Outcome> {
        ensure!(self.subsets >= 1, "need at least one subset");
        ensure!(
            self.timestamps >= u64::from(self.subsets),
            "fewer timestamps than subsets"
        );
        ensure!(
            self.lambda_b.iter().all(|&l| l > 0.0 && l.is_finite()),
            "fluxes must be positive"
        );
        let per_subset = self.timestamps / u64::from(self.subsets);
        let mut rows = Vec::new();
        let mut subset_rows = Vec::new();
        for (f, &lb) in self.lambda_b.iter().enumerate() {
            let exp = Exp::new(lb)?;
            // The last subset absorbs the remainder.
            let subsets: Vec<Vec<TimePs>> = (0..self.subsets)
                .into_par_iter()
                .map(|s| {
                    let mut rng = stream_rng(seed, stream_id(f as u32, s));
                    let n = if s + 1 == self.subsets {
                        self.timestamps - per_subset * u64::from(s)
                    } else {
                        per_subset
                    };
                    (0..n)
                        .map(|_| TimePs::from_seconds(exp.sample(&mut rng)))
                        .collect()
                })
                .collect();
            let per: Vec<SubsetRow> = subsets
                .par_iter()
                .enumerate()
                .map(|(s, gaps)| {
                    let r = self.recover(gaps)?;
                    Ok(SubsetRow {
                        lambda_b: lb,
                        subset: s as u32,
                        lambda_fit: r.fit,
                        lambda_lin: r.lin,
                        deviation: r.lin / r.fit - 1.0,
                    })
                })
                .collect::<Result<_>>()?;
            let full = self.recover(&subsets.concat())?;
            let devs: Vec<f64> = per.iter().map(|r| r.deviation).collect();
            let (mean, std) = mean_std(&devs);
            let photons = lb * self.t_acq;
            rows.push(FluxRow {
                lambda_b: lb,
                detections_per_window: photons,
                multiple_of_5pct_rule: photons / 0.05,
                lambda_fit: full.fit,
                lambda_lin: full.lin,
                deviation_vs_fit: full.lin / full.fit - 1.0,
                deviation_vs_truth: full.lin / lb - 1.0,
                windows: full.windows,
                subset_mean_deviation: mean,
                subset_std_deviation: std,
                subset_min_deviation: devs.iter().copied().fold(f64::INFINITY, f64::min),
                subset_max_deviation: devs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
            subset_rows.extend(per);
        }

        let worst_full = rows
            .iter()
            .map(|r| r.deviation_vs_fit.abs().max(r.deviation_vs_truth.abs()))
            .fold(0.0, f64::max);
        let worst_subset = rows
            .iter()
            .map(|r| r.subset_min_deviation.abs().max(r.subset_max_deviation.abs()))
            .fold(0.0, f64::max);
        let checks = vec![
            Check::new(
                "full_dataset_recovery",
                worst_full <= self.tolerance,
                format!(
                    "worst deviation {:.3}% against ±{:.2}%",
                    100.0 * worst_full,
                    100.0 * self.tolerance
                ),
            ),
            Check::new(
                "subset_spread",
                worst_subset <= self.subset_tolerance,
                format!(
                    "worst subset deviation {:.3}% against ±{:.2}%",
                    100.0 * worst_subset,
                    100.0 * self.subset_tolerance
                ),
            ),
        ];
        Ok(Outcome {
            files: vec![
                ("linearize_bg.csv".into(), csv_bytes(&rows)?),
                ("linearize_bg_subsets.csv".into(), csv_bytes(&subset_rows)?),
            ],
            results: json!({ "fluxes": rows }),
            checks,
        })
    }
}
