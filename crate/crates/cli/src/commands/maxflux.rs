//! Highest flux the TDC tolerates before bins see several photons.

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;
use spadlin::photon_model::max_sustainable_flux;

use crate::util::csv_bytes;
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaxFlux {
    /// TDC resolution, seconds.
    pub t_ts: f64,
    /// Tolerated probability of more than one photon per bin.
    pub threshold: f64,
    /// Extra thresholds tabulated alongside.
    pub thresholds: Vec<f64>,
    pub t_acq: f64,
    /// Detections per window allowed by the conventional pile-up rule.
    pub pileup_rule: f64,
}

impl Default for MaxFlux {
    fn default() -> Self {
        MaxFlux {
            t_ts: 100e-12,
            threshold: 0.01,
            thresholds: vec![0.001, 0.005, 0.01, 0.05, 0.1, 0.5],
            t_acq: 100e-9,
            pileup_rule: 0.05,
        }
    }
}

#[derive(Serialize)]
struct Row {
    threshold: f64,
    lambda_max: f64,
    ratio_to_rule: f64,
}

impl Experiment for MaxFlux {
    const NAME: &'static str = "maxflux";

    fn run(&self, _seed: u64) -> Result<Outcome> {
        ensure!(self.t_acq > 0.0, "t_acq must be positive");
        let rule_flux = self.pileup_rule / self.t_acq;
        let lambda = max_sustainable_flux(self.t_ts, self.threshold)?;
        let mut thresholds = self.thresholds.clone();
        thresholds.sort_by(f64::total_cmp);
        let rows = thresholds
            .iter()
            .map(|&p| {
                let l = max_sustainable_flux(self.t_ts, p)?;
                Ok(Row {
                    threshold: p,
                    lambda_max: l,
                    ratio_to_rule: l / rule_flux,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let monotone = rows.windows(2).all(|w| w[1].lambda_max > w[0].lambda_max);
        let ratio = lambda / rule_flux;
        let checks = vec![
            Check::new(
                "lambda_max",
                (lambda / 1.48e9 - 1.0).abs() <= 0.01,
                format!("{lambda:.4e} events/s"),
            ),
            Check::new(
                "ratio_to_pileup_rule",
                (ratio / 3000.0 - 1.0).abs() <= 0.05,
                format!("{ratio:.0}x the {rule_flux:.3e} events/s rule"),
            ),
            Check::new("monotone_in_threshold", monotone, format!("{} thresholds", rows.len())),
        ];
        Ok(Outcome {
            files: vec![("maxflux.csv".into(), csv_bytes(&rows)?)],
            results: json!({
                "lambda_max": lambda,
                "rule_flux": rule_flux,
                "ratio": ratio,
            }),
            checks,
        })
    }
}
