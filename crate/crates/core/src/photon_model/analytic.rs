//! Closed-form photon statistics.
//!
//! Two regimes are covered. The *linear* regime describes a detector without
//! dead time: conditioned on their number, the photon arrival times in the
//! window are i.i.d. with density proportional to `λ(t)`. The *first-photon*
//! regime describes a classic SPAD that only reports the earliest arrival of
//! each laser cycle; its law is piecewise exponential and depends
//! non-linearly on both the signal rate and the time of flight.

use super::{LaserPulse, PulseShape, SceneConfig};
use crate::{Error, Result};

fn total_photons(scene: &SceneConfig) -> Result<f64> {
    let total = scene.total_photons();
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::ZeroIntensity)
    }
}

/// Density of a single arrival time in the linear regime at `t` seconds.
pub fn linear_density(scene: &SceneConfig, t: f64) -> Result<f64> {
    scene.check_in_window("t", t)?;
    Ok(scene.intensity_unchecked(t) / total_photons(scene)?)
}

/// Distribution function matching [`linear_density`].
pub fn linear_cdf(scene: &SceneConfig, t: f64) -> Result<f64> {
    let total = total_photons(scene)?;
    Ok((scene.cumulative_intensity(t) / total).clamp(0.0, 1.0))
}

/// Mean arrival time `μ` in the linear regime.
pub fn linear_mean(scene: &SceneConfig) -> Result<f64> {
    let total = total_photons(scene)?;
    let pulse = scene.pulse();
    let t_acq = scene.t_acq();
    let background = scene.lambda_b() * t_acq * t_acq / 2.0;
    let signal = pulse.mean_photons * (scene.tof() + pulse.profile_mean());
    Ok((background + signal) / total)
}

/// Fraction of the expected photons that come from the background.
pub fn alpha(scene: &SceneConfig) -> Result<f64> {
    let total = total_photons(scene)?;
    Ok(scene.background_photons() / total)
}

/// Below this value of `1 - α` the inversion is reported as ill-conditioned.
const MIN_SIGNAL_FRACTION: f64 = 1e-12;

/// Inverts the linear-regime mean for the time of flight:
/// `ToF = (μ − α·T_acq/2) / (1 − α) − t̄_l`.
pub fn tof_from_mu(mu: f64, alpha: f64, t_acq: f64, t_laser_mean: f64) -> Result<f64> {
    if alpha.is_nan() || alpha >= 1.0 {
        return Err(Error::NoSignal { alpha });
    }
    let one_minus_alpha = 1.0 - alpha;
    if one_minus_alpha < MIN_SIGNAL_FRACTION {
        return Err(Error::IllConditioned { one_minus_alpha });
    }
    Ok((mu - alpha * t_acq / 2.0) / one_minus_alpha - t_laser_mean)
}

/// Mean arrival time of laser photons relative to emission, `t̄_l`.
pub fn laser_mean_time(pulse: &LaserPulse) -> Result<f64> {
    pulse.validate()?;
    if pulse.mean_photons <= 0.0 {
        return Err(Error::ZeroIntensity);
    }
    Ok(pulse.profile_mean())
}

/// Amplitudes of the piecewise-exponential first-photon law for a
/// rectangular pulse of rate `λ_S`.
///
/// Each segment reads `A·exp(−rate·t)`:
///
/// | term | segment | rate |
/// |------|---------|------|
/// | `a0` | background only, any `t` | `λ_B` |
/// | `a1` | laser only, inside the pulse | `λ_S` |
/// | `a2` | background + laser, inside the pulse | `λ_S + λ_B` |
/// | `a3` | background + laser, after the pulse | `λ_B` |
///
/// `a3 < a0` whenever the pulse carries photons: the echo suppresses later
/// background detections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPhotonAmplitudes {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

struct RectScene {
    lb: f64,
    ls: f64,
    tof: f64,
    width: f64,
}

fn rect_scene(scene: &SceneConfig) -> Result<RectScene> {
    let pulse = scene.pulse();
    if pulse.shape != PulseShape::Rectangular {
        return Err(Error::UnsupportedPulse);
    }
    Ok(RectScene {
        lb: scene.lambda_b(),
        ls: pulse.peak_rate()?,
        tof: scene.tof(),
        width: pulse.width,
    })
}

pub fn first_photon_amplitudes(scene: &SceneConfig) -> Result<FirstPhotonAmplitudes> {
    let RectScene { lb, ls, tof, width } = rect_scene(scene)?;
    Ok(FirstPhotonAmplitudes {
        a0: lb,
        a1: ls * (ls * tof).exp(),
        a2: (ls + lb) * (ls * tof).exp(),
        a3: lb * (-ls * width).exp(),
    })
}

/// Density of the first arrival time on `[0, ∞)` for a rectangular pulse.
///
/// The law is not truncated to the acquisition window: it describes a
/// detector that keeps listening until the first photon arrives.
pub fn first_photon_density(scene: &SceneConfig, t: f64) -> Result<f64> {
    let RectScene { lb, ls, tof, width } = rect_scene(scene)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::OutsideWindow {
            what: "t",
            value: t,
            t_acq: f64::INFINITY,
        });
    }
    // Exponents are combined before exponentiating to keep large
    // `λ_S·ToF` products finite.
    Ok(if t <= tof {
        lb * (-lb * t).exp()
    } else if t <= tof + width {
        (ls + lb) * (ls * tof - (ls + lb) * t).exp()
    } else {
        lb * (-ls * width - lb * t).exp()
    })
}

/// Probability that the first arrival happens before `t`.
pub fn first_photon_cdf(scene: &SceneConfig, t: f64) -> Result<f64> {
    let RectScene { lb, ls, tof, width } = rect_scene(scene)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let exposure = if t <= tof {
        lb * t
    } else if t <= tof + width {
        lb * t + ls * (t - tof)
    } else {
        lb * t + ls * width
    };
    Ok(-(-exposure).exp_m1())
}

/// Mean first arrival time `E[T]` for a rectangular pulse.
pub fn first_photon_mean(scene: &SceneConfig) -> Result<f64> {
    let RectScene { lb, ls, tof, width } = rect_scene(scene)?;
    if lb <= 0.0 {
        // With no background there is a finite chance of never detecting a
        // photon, and the mean diverges.
        return Err(Error::ZeroIntensity);
    }
    let before = -(-lb * tof).exp_m1() / lb;
    let during = (-lb * tof).exp() * -(-(ls + lb) * width).exp_m1() / (ls + lb);
    let after = (-ls * width - lb * (tof + width)).exp() / lb;
    Ok(before + during + after)
}

/// Probability that a TDC bin of width `t_ts` receives more than one photon
/// at rate `rate`.
pub fn multi_photon_probability(rate: f64, t_ts: f64) -> f64 {
    let x = rate * t_ts;
    // 1 − e^{−x}(1 + x), arranged to stay accurate for small x.
    -(-x).exp_m1() - x * (-x).exp()
}

/// Bracket for the flux search, events/s.
const FLUX_BRACKET: (f64, f64) = (1.0, 1e13);

/// Largest photon rate for which a TDC bin of width `t_ts` sees more than
/// one photon with probability at most `p_threshold`.
pub fn max_sustainable_flux(t_ts: f64, p_threshold: f64) -> Result<f64> {
    if !(t_ts > 0.0 && t_ts.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "TDC resolution must be positive, got {t_ts}"
        )));
    }
    if !(p_threshold > 0.0 && p_threshold < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "probability threshold must lie in (0, 1), got {p_threshold}"
        )));
    }
    let (mut lo, mut hi) = FLUX_BRACKET;
    let f = |rate: f64| multi_photon_probability(rate, t_ts) - p_threshold;
    if f(lo) >= 0.0 {
        return Ok(lo);
    }
    if f(hi) <= 0.0 {
        return Ok(hi);
    }
    // Bisect in log space; the bracket spans thirteen decades.
    while hi / lo - 1.0 > 1e-9 {
        let mid = (lo * hi).sqrt();
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
