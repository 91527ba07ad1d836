use serde::{Deserialize, Serialize};

use super::LaserPulse;
use crate::{Error, Result};

/// A complete single-target scenario: constant background, one laser echo
/// starting at `tof`, observed over `[0, t_acq]`.
///
/// Construction validates the scene, so every `SceneConfig` in circulation
/// satisfies `lambda_b >= 0`, `tof >= 0` and `tof + pulse.width <= t_acq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScene", into = "RawScene")]
pub struct SceneConfig {
    lambda_b: f64,
    pulse: LaserPulse,
    tof: f64,
    t_acq: f64,
}

#[derive(Serialize, Deserialize)]
struct RawScene {
    lambda_b: f64,
    pulse: LaserPulse,
    tof: f64,
    t_acq: f64,
}

impl TryFrom<RawScene> for SceneConfig {
    type Error = Error;

    fn try_from(raw: RawScene) -> Result<Self> {
        SceneConfig::new(raw.lambda_b, raw.pulse, raw.tof, raw.t_acq)
    }
}

impl From<SceneConfig> for RawScene {
    fn from(s: SceneConfig) -> Self {
        RawScene {
            lambda_b: s.lambda_b,
            pulse: s.pulse,
            tof: s.tof,
            t_acq: s.t_acq,
        }
    }
}

impl SceneConfig {
    pub fn new(lambda_b: f64, pulse: LaserPulse, tof: f64, t_acq: f64) -> Result<Self> {
        pulse.validate()?;
        if !(lambda_b.is_finite() && lambda_b >= 0.0) {
            return Err(Error::InvalidScene(format!(
                "background rate must be non-negative, got {lambda_b}"
            )));
        }
        if !(t_acq.is_finite() && t_acq > 0.0) {
            return Err(Error::InvalidScene(format!(
                "acquisition window must be positive, got {t_acq}"
            )));
        }
        if !(tof.is_finite() && tof >= 0.0) {
            return Err(Error::InvalidScene(format!(
                "time of flight must be non-negative, got {tof}"
            )));
        }
        // Allow a few ulps so that scenes built as `t_acq = tof + width` pass.
        if tof + pulse.width > t_acq * (1.0 + 4.0 * f64::EPSILON) {
            return Err(Error::InvalidScene(format!(
                "echo [{tof:e}, {:e}] does not fit in the window [0, {t_acq:e}]",
                tof + pulse.width
            )));
        }
        Ok(SceneConfig {
            lambda_b,
            pulse,
            tof,
            t_acq,
        })
    }

    /// Background-only scene used for the first acquisition phase.
    pub fn background_only(&self) -> Self {
        SceneConfig {
            pulse: self.pulse.off(),
            ..*self
        }
    }

    pub fn with_tof(&self, tof: f64) -> Result<Self> {
        Self::new(self.lambda_b, self.pulse, tof, self.t_acq)
    }

    pub fn with_lambda_b(&self, lambda_b: f64) -> Result<Self> {
        Self::new(lambda_b, self.pulse, self.tof, self.t_acq)
    }

    pub fn with_pulse(&self, pulse: LaserPulse) -> Result<Self> {
        Self::new(self.lambda_b, pulse, self.tof, self.t_acq)
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    pub fn pulse(&self) -> &LaserPulse {
        &self.pulse
    }

    pub fn tof(&self) -> f64 {
        self.tof
    }

    pub fn t_acq(&self) -> f64 {
        self.t_acq
    }

    /// Expected background photons per window, `λ_B·T_acq`.
    pub fn background_photons(&self) -> f64 {
        self.lambda_b * self.t_acq
    }

    /// Expected photons per window from both sources.
    pub fn total_photons(&self) -> f64 {
        self.background_photons() + self.pulse.mean_photons
    }

    pub(crate) fn check_in_window(&self, what: &'static str, t: f64) -> Result<()> {
        if (0.0..=self.t_acq).contains(&t) {
            Ok(())
        } else {
            Err(Error::OutsideWindow {
                what,
                value: t,
                t_acq: self.t_acq,
            })
        }
    }

    /// Rate of the composite process `λ(t)` at `t` seconds into the window.
    pub fn composite_intensity(&self, t: f64) -> Result<f64> {
        self.check_in_window("t", t)?;
        Ok(self.intensity_unchecked(t))
    }

    pub(crate) fn intensity_unchecked(&self, t: f64) -> f64 {
        self.lambda_b + self.pulse.intensity(t - self.tof)
    }

    /// Integrated intensity `Λ(t) = ∫₀ᵗ λ(u) du`, clamped to the window.
    pub fn cumulative_intensity(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.t_acq);
        self.lambda_b * t + self.pulse.mean_photons * self.pulse.energy_fraction(t - self.tof)
    }

    /// Smallest `t` in the window with `Λ(t) >= y`, or `None` when `y`
    /// exceeds `Λ(T_acq)`.
    pub(crate) fn inverse_cumulative(&self, y: f64) -> Option<f64> {
        let total = self.cumulative_intensity(self.t_acq);
        if y.is_nan() || y > total {
            return None;
        }
        if y <= 0.0 {
            return Some(0.0);
        }
        let lb = self.lambda_b;
        let photons = self.pulse.mean_photons;
        let start = self.tof;
        let end = self.tof + self.pulse.width;

        let at_start = lb * start;
        if y <= at_start {
            return Some(y / lb);
        }
        let at_end = lb * end + photons;
        if y > at_end {
            // lb > 0 here, otherwise y <= total == at_end.
            return Some(((y - photons) / lb).min(self.t_acq));
        }
        let t = match self.pulse.shape {
            super::PulseShape::Rectangular => {
                let rate = lb + photons / self.pulse.width;
                start + (y - at_start) / rate
            }
            super::PulseShape::TruncatedGaussian { .. } => {
                // Λ is continuous and non-decreasing on the pulse segment.
                let (mut lo, mut hi) = (start, end);
                while hi - lo > hi * 2.0 * f64::EPSILON {
                    let mid = 0.5 * (lo + hi);
                    if self.cumulative_intensity(mid) >= y {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };
        Some(t.clamp(start, end))
    }
}
