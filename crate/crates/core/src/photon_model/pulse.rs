use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::{Error, Result};

/// Temporal profile of the reflected laser pulse over `[0, width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PulseShape {
    Rectangular,
    /// Gaussian restricted to `[0, width)`; `center` and `sigma` are in
    /// seconds relative to the pulse start.
    TruncatedGaussian { center: f64, sigma: f64 },
}

/// The reflected laser echo: `mean_photons` expected photons spread over
/// `width` seconds according to `shape`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPulse {
    #[serde(flatten)]
    pub shape: PulseShape,
    pub width: f64,
    pub mean_photons: f64,
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

impl LaserPulse {
    pub fn rectangular(width: f64, mean_photons: f64) -> Self {
        LaserPulse {
            shape: PulseShape::Rectangular,
            width,
            mean_photons,
        }
    }

    /// Rectangular pulse described by its photon rate while on.
    pub fn rectangular_rate(width: f64, rate: f64) -> Self {
        Self::rectangular(width, rate * width)
    }

    pub fn truncated_gaussian(width: f64, mean_photons: f64, center: f64, sigma: f64) -> Self {
        LaserPulse {
            shape: PulseShape::TruncatedGaussian { center, sigma },
            width,
            mean_photons,
        }
    }

    /// A pulse carrying no photons, used for background-only acquisitions.
    pub fn off(self) -> Self {
        LaserPulse {
            mean_photons: 0.0,
            ..self
        }
    }

    pub fn with_mean_photons(self, mean_photons: f64) -> Self {
        LaserPulse {
            mean_photons,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidScene(format!(
                "pulse width must be positive, got {}",
                self.width
            )));
        }
        if !(self.mean_photons.is_finite() && self.mean_photons >= 0.0) {
            return Err(Error::InvalidScene(format!(
                "pulse mean photon count must be non-negative, got {}",
                self.mean_photons
            )));
        }
        if let PulseShape::TruncatedGaussian { center, sigma } = self.shape {
            if !(sigma.is_finite() && sigma > 0.0 && center.is_finite()) {
                return Err(Error::InvalidScene(format!(
                    "gaussian pulse needs finite center and positive sigma, got center={center}, sigma={sigma}"
                )));
            }
            if self.gaussian_mass(center, sigma) <= 1e-12 {
                return Err(Error::InvalidScene(
                    "gaussian pulse has no mass inside [0, width)".into(),
                ));
            }
        }
        Ok(())
    }

    fn gaussian_mass(&self, center: f64, sigma: f64) -> f64 {
        let n = standard_normal();
        n.cdf((self.width - center) / sigma) - n.cdf(-center / sigma)
    }

    /// Photon rate in events/s while the pulse is on.
    ///
    /// Only meaningful for rectangular pulses, where it is constant.
    pub fn peak_rate(&self) -> Result<f64> {
        match self.shape {
            PulseShape::Rectangular => Ok(self.mean_photons / self.width),
            PulseShape::TruncatedGaussian { .. } => Err(Error::UnsupportedPulse),
        }
    }

    /// Normalised pulse profile: integrates to one over `[0, width)`.
    pub fn profile(&self, t: f64) -> f64 {
        if !(0.0..self.width).contains(&t) {
            return 0.0;
        }
        match self.shape {
            PulseShape::Rectangular => 1.0 / self.width,
            PulseShape::TruncatedGaussian { center, sigma } => {
                standard_normal().pdf((t - center) / sigma)
                    / (sigma * self.gaussian_mass(center, sigma))
            }
        }
    }

    /// Instantaneous photon rate `λ_S(t)` in events/s, with `t` relative to
    /// the pulse start.
    pub fn intensity(&self, t: f64) -> f64 {
        self.mean_photons * self.profile(t)
    }

    /// Fraction of the pulse energy emitted before `t`.
    pub fn energy_fraction(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.width {
            return 1.0;
        }
        match self.shape {
            PulseShape::Rectangular => t / self.width,
            PulseShape::TruncatedGaussian { center, sigma } => {
                let n = standard_normal();
                let lo = n.cdf(-center / sigma);
                ((n.cdf((t - center) / sigma) - lo) / self.gaussian_mass(center, sigma))
                    .clamp(0.0, 1.0)
            }
        }
    }

    /// Inverse of [`energy_fraction`](Self::energy_fraction) for `u` in `[0, 1]`.
    pub fn inverse_energy_fraction(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self.shape {
            PulseShape::Rectangular => u * self.width,
            PulseShape::TruncatedGaussian { center, sigma } => {
                let n = standard_normal();
                let lo = n.cdf(-center / sigma);
                let p = lo + u * self.gaussian_mass(center, sigma);
                (center + sigma * n.inverse_cdf(p.clamp(0.0, 1.0))).clamp(0.0, self.width)
            }
        }
    }

    /// Mean emission time of the profile, independent of `mean_photons`.
    pub(crate) fn profile_mean(&self) -> f64 {
        match self.shape {
            PulseShape::Rectangular => self.width / 2.0,
            PulseShape::TruncatedGaussian { center, sigma } => {
                let n = standard_normal();
                let a = -center / sigma;
                let b = (self.width - center) / sigma;
                center + sigma * (n.pdf(a) - n.pdf(b)) / self.gaussian_mass(center, sigma)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangular_profile() {
        let p = LaserPulse::rectangular_rate(4e-9, 1e8);
        assert!((p.mean_photons - 0.4).abs() < 1e-15);
        assert_eq!(p.peak_rate().unwrap(), 1e8);
        assert!((p.intensity(1e-9) - 1e8).abs() < 1e-3);
        assert_eq!(p.intensity(4e-9), 0.0);
        assert_eq!(p.intensity(-1e-12), 0.0);
        assert_eq!(p.energy_fraction(1e-9), 0.25);
        assert_eq!(p.inverse_energy_fraction(0.25), 1e-9);
    }

    #[test]
    fn gaussian_inverse_is_consistent() {
        let p = LaserPulse::truncated_gaussian(4e-9, 1.0, 1.2e-9, 0.7e-9);
        p.validate().unwrap();
        for k in 1..20 {
            let u = k as f64 / 20.0;
            let t = p.inverse_energy_fraction(u);
            assert!((p.energy_fraction(t) - u).abs() < 1e-9, "u={u}");
        }
        assert!(p.peak_rate().is_err());
    }

    #[test]
    fn centered_gaussian_mean_is_half_width() {
        let p = LaserPulse::truncated_gaussian(4e-9, 1.0, 2e-9, 0.8e-9);
        assert!((p.profile_mean() - 2e-9).abs() < 1e-21);
    }

    #[test]
    fn rejects_bad_pulses() {
        assert!(LaserPulse::rectangular(0.0, 1.0).validate().is_err());
        assert!(LaserPulse::rectangular(1e-9, -1.0).validate().is_err());
        assert!(LaserPulse::truncated_gaussian(1e-9, 1.0, 0.5e-9, 0.0)
            .validate()
            .is_err());
        assert!(LaserPulse::truncated_gaussian(1e-9, 1.0, 1.0, 1e-12)
            .validate()
            .is_err());
    }
}
