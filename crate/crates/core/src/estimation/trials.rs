use serde::{Deserialize, Serialize};

use super::ToFEstimate;
use crate::{Error, Result};

/// Accuracy and precision of repeated estimates against a known truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    /// Mean of `estimate - truth`, seconds.
    pub mean_error: f64,
    /// Sample standard deviation of the estimates, seconds.
    pub std_dev: f64,
    pub rel_accuracy: f64,
    pub rel_precision: f64,
    /// Valid estimates used.
    pub trials: usize,
    /// Estimates skipped because they were flagged invalid.
    pub invalid: usize,
}

/// JSON form of [`TrialStats`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub mean_error_ps: f64,
    pub std_ps: f64,
    pub rel_accuracy: f64,
    pub rel_precision: f64,
    pub trials: usize,
}

impl TrialStats {
    pub fn record(&self) -> TrialRecord {
        TrialRecord {
            mean_error_ps: self.mean_error * 1e12,
            std_ps: self.std_dev * 1e12,
            rel_accuracy: self.rel_accuracy,
            rel_precision: self.rel_precision,
            trials: self.trials,
        }
    }
}

/// Summarises the valid estimates among `estimates`.
pub fn accuracy_precision(estimates: &[ToFEstimate], truth: f64) -> Result<TrialStats> {
    let errors: Vec<f64> = estimates
        .iter()
        .filter(|e| e.valid)
        .map(|e| e.tof - truth)
        .collect();
    let n = errors.len();
    if n < 2 {
        return Err(Error::InsufficientTrials(n));
    }
    let mean = errors.iter().sum::<f64>() / n as f64;
    let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std_dev = var.sqrt();
    Ok(TrialStats {
        mean_error: mean,
        std_dev,
        rel_accuracy: mean / truth,
        rel_precision: std_dev / truth,
        trials: n,
        invalid: estimates.len() - n,
    })
}
