use std::fmt;

use serde::{Deserialize, Serialize};

pub const PS_PER_SECOND: f64 = 1e12;

/// A timestamp in integer picoseconds from the start of the acquisition window.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TimePs(pub u64);

impl TimePs {
    pub const ZERO: TimePs = TimePs(0);

    /// Rounds to the nearest picosecond. Negative inputs clamp to zero.
    pub fn from_seconds(seconds: f64) -> Self {
        let ps = (seconds * PS_PER_SECOND).round();
        TimePs(if ps > 0.0 { ps as u64 } else { 0 })
    }

    pub fn as_seconds(self) -> f64 {
        self.0 as f64 / PS_PER_SECOND
    }

    pub fn ps(self) -> u64 {
        self.0
    }
}

impl From<u64> for TimePs {
    fn from(ps: u64) -> Self {
        TimePs(ps)
    }
}

impl fmt::Display for TimePs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ps", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seconds_round_trip() {
        assert_eq!(TimePs::from_seconds(20.05e-9), TimePs(20_050));
        assert_eq!(TimePs(20_050).as_seconds(), 20.05e-9);
        assert_eq!(TimePs::from_seconds(-1e-9), TimePs::ZERO);
        assert_eq!(TimePs::from_seconds(0.4e-12), TimePs(0));
        assert_eq!(TimePs::from_seconds(0.6e-12), TimePs(1));
    }
}
