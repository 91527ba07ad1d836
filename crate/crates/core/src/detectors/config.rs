use serde::{Deserialize, Serialize};

use crate::photon_model::SceneConfig;
use crate::{Error, Result, TimePs};

/// Timestamping front end: TDC resolution and range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    /// TDC resolution in seconds.
    pub t_ts: f64,
    pub tdc_bits: u32,
    /// When false, timestamps keep picosecond resolution.
    pub apply_quantization: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            t_ts: 100e-12,
            tdc_bits: 10,
            apply_quantization: false,
        }
    }
}

impl DetectorConfig {
    /// 100 ps, 10-bit TDC with quantization enabled.
    pub fn sensor() -> Self {
        DetectorConfig {
            apply_quantization: true,
            ..Self::default()
        }
    }

    pub fn t_ts_ps(&self) -> u64 {
        TimePs::from_seconds(self.t_ts).ps().max(1)
    }

    pub fn bins(&self) -> u64 {
        1u64 << self.tdc_bits.min(63)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_ts > 0.0 && self.t_ts.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "TDC resolution must be positive, got {}",
                self.t_ts
            )));
        }
        if self.tdc_bits == 0 || self.tdc_bits > 40 {
            return Err(Error::InvalidConfig(format!(
                "TDC bits must be in 1..=40, got {}",
                self.tdc_bits
            )));
        }
        Ok(())
    }

    /// Checks that the TDC range covers the scene's window when quantizing.
    pub fn validate_for(&self, scene: &SceneConfig) -> Result<()> {
        self.validate()?;
        if self.apply_quantization {
            let range = self.bins() * self.t_ts_ps();
            let window = TimePs::from_seconds(scene.t_acq()).ps();
            if range < window {
                return Err(Error::InvalidConfig(format!(
                    "{}-bit TDC at {} ps covers {range} ps, window is {window} ps",
                    self.tdc_bits,
                    self.t_ts_ps()
                )));
            }
        }
        Ok(())
    }

    /// Timestamp reported for a photon at `t`: the centre of its TDC bin, or
    /// `t` itself without quantization.
    pub fn detect(&self, t: TimePs) -> TimePs {
        if self.apply_quantization {
            let w = self.t_ts_ps();
            TimePs((t.ps() / w) * w + w / 2)
        } else {
            t
        }
    }

    /// Earliest instant, in seconds, at which a gate re-armed after a
    /// detection reported as `t` can see a photon with a later timestamp.
    pub fn gate_after(&self, t: TimePs) -> f64 {
        if self.apply_quantization {
            let w = self.t_ts_ps();
            TimePs((t.ps() / w + 1) * w).as_seconds()
        } else {
            t.as_seconds()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon_model::LaserPulse;

    #[test]
    fn quantizes_to_bin_centres() {
        let cfg = DetectorConfig::sensor();
        assert_eq!(cfg.detect(TimePs(0)), TimePs(50));
        assert_eq!(cfg.detect(TimePs(199)), TimePs(150));
        assert_eq!(cfg.gate_after(TimePs(150)), 200e-12);
        let raw = DetectorConfig::default();
        assert_eq!(raw.detect(TimePs(199)), TimePs(199));
    }

    #[test]
    fn range_must_cover_window() {
        let scene =
            SceneConfig::new(1e6, LaserPulse::rectangular(4e-9, 1.0), 20e-9, 100e-9).unwrap();
        DetectorConfig::sensor().validate_for(&scene).unwrap();
        let short = DetectorConfig {
            tdc_bits: 9,
            ..DetectorConfig::sensor()
        };
        assert!(short.validate_for(&scene).is_err());
        let unquantized = DetectorConfig {
            tdc_bits: 9,
            ..DetectorConfig::default()
        };
        unquantized.validate_for(&scene).unwrap();
        assert!(DetectorConfig {
            t_ts: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
