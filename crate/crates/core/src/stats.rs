//! Goodness-of-fit tests used by the experiments and the test suite.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `sorted` and a continuous `cdf`.
///
/// # Panics
///
/// Panics if `sorted` is empty.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!sorted.is_empty(), "KS statistic of an empty sample");
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * x * x).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn stephens_scale(n: usize) -> f64 {
    let s = (n as f64).sqrt();
    s + 0.12 + 0.11 / s
}

/// Asymptotic p-value of a KS distance `d` from `n` samples, with
/// Stephens' small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    kolmogorov_sf(d * stephens_scale(n))
}

/// KS distance at which a sample of size `n` is rejected at level `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 5.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / stephens_scale(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of `observed` counts against bin probabilities
/// `probs` (rescaled to the observed total).
///
/// Adjacent bins are merged until each expects at least 5 counts.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len(), "bin count mismatch");
    let n: u64 = observed.iter().sum();
    let p_total: f64 = probs.iter().sum();
    let scale = n as f64 / p_total;

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(probs) {
        o += obs as f64;
        e += p * scale;
        if e >= 5.0 {
            groups.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => groups.push((o, e)),
        }
    }
    let statistic: f64 = groups
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else { 0.0 })
        .sum();
    let dof = groups.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub statistic: f64,
    pub dof: usize,
    /// Two-sided.
    pub p_value: f64,
}

/// Two-sided one-sample t-test of `samples` against mean `mu0`.
///
/// # Panics
///
/// Panics with fewer than two samples.
pub fn one_sample_t_test(samples: &[f64], mu0: f64) -> TTest {
    assert!(samples.len() >= 2, "t-test needs two samples");
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let statistic = (mean - mu0) / (var / n).sqrt();
    let dof = samples.len() - 1;
    let p_value = if statistic.is_nan() {
        1.0
    } else {
        let t = StudentsT::new(0.0, 1.0, dof as f64).expect("positive degrees of freedom");
        2.0 * t.sf(statistic.abs())
    };
    TTest {
        statistic,
        dof,
        p_value,
    }
}
