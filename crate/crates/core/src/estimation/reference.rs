//! Histogram-based reference estimators, used as baselines and to validate
//! the histogram-less estimator.

use serde::{Deserialize, Serialize};

use crate::detectors::Histogram;
use crate::{Error, Result};

/// Result of [`exponential_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    /// Decay rate, events/s.
    pub rate: f64,
    /// Counts are flat, rising, or all in the first bin; `rate` is then a
    /// limit value (0 or infinity) rather than a fit.
    pub degenerate: bool,
}

/// Mean bin index of a geometric law with ratio `e^{-x}` truncated to
/// `k` bins.
fn truncated_geometric_mean(x: f64, k: f64) -> f64 {
    if x * k < 1e-4 {
        (k - 1.0) / 2.0 - (k * k - 1.0) * x / 12.0
    } else {
        1.0 / x.exp_m1() - k / (k * x).exp_m1()
    }
}

/// Maximum-likelihood decay rate of an exponential truncated to `region`
/// (seconds), fitted to the binned counts.
///
/// Bins whose start lies in the region take part. The binned likelihood is
/// maximised exactly, so the estimate carries no discretisation bias.
pub fn exponential_fit(h: &Histogram, region: (f64, f64)) -> Result<ExpFit> {
    let bins = h.bins_in(region.0, region.1);
    let counts = &h.counts()[bins];
    let n: f64 = counts.iter().map(|&c| f64::from(c)).sum();
    if n == 0.0 {
        return Err(Error::EmptyRegion);
    }
    let k = counts.len() as f64;
    let mean_index = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * f64::from(c))
        .sum::<f64>()
        / n;
    let w = h.bin_width();
    if mean_index <= 0.0 {
        return Ok(ExpFit {
            rate: f64::INFINITY,
            degenerate: true,
        });
    }
    if mean_index >= (k - 1.0) / 2.0 {
        return Ok(ExpFit {
            rate: 0.0,
            degenerate: true,
        });
    }
    // The mean index decreases monotonically in x; bisect in log space.
    let (mut lo, mut hi) = (1e-15_f64, 1e3_f64);
    while hi / lo - 1.0 > 1e-10 {
        let mid = (lo * hi).sqrt();
        if truncated_geometric_mean(mid, k) > mean_index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ExpFit {
        rate: (lo * hi).sqrt() / w,
        degenerate: false,
    })
}

/// Event rate seen by a linearized detector: counts in `region` divided by
/// the number of windows and the region duration.
pub fn rate_from_linearized(h: &Histogram, region: (f64, f64), windows: u64) -> Result<f64> {
    if windows == 0 {
        return Err(Error::InvalidConfig("window count must be positive".into()));
    }
    let bins = h.bins_in(region.0, region.1);
    if bins.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "region [{:e}, {:e}] s covers no histogram bins",
            region.0, region.1
        )));
    }
    let duration = bins.len() as f64 * h.bin_width();
    let counts: u64 = h.counts()[bins].iter().map(|&c| u64::from(c)).sum();
    Ok(counts as f64 / (windows as f64 * duration))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEstimate {
    /// Centre of the peak bin, seconds.
    pub time: f64,
    pub bin: usize,
    /// Several bins tie even after comparing raw counts.
    pub low_confidence: bool,
}

/// Location of the histogram maximum after 3-bin moving-average smoothing.
///
/// Ties in the smoothed histogram go to the larger raw count, then to the
/// earliest bin.
pub fn peak_estimate(h: &Histogram) -> Result<PeakEstimate> {
    let c = h.counts();
    if c.iter().all(|&x| x == 0) {
        return Err(Error::EmptyRegion);
    }
    let smoothed = |i: usize| -> f64 {
        let lo = i.saturating_sub(1);
        let hi = (i + 2).min(c.len());
        let s: u64 = c[lo..hi].iter().map(|&x| u64::from(x)).sum();
        s as f64 / (hi - lo) as f64
    };
    let key = |i: usize| (smoothed(i), c[i]);
    let mut best = 0;
    let mut ties = 1;
    for i in 1..c.len() {
        let (s, r) = key(i);
        let (bs, br) = key(best);
        if s > bs || (s == bs && r > br) {
            best = i;
            ties = 1;
        } else if s == bs && r == br {
            ties += 1;
        }
    }
    Ok(PeakEstimate {
        time: h.bin_center(best).as_seconds(),
        bin: best,
        low_confidence: ties > 1,
    })
}
