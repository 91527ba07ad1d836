use serde::{Deserialize, Serialize};

use crate::TimePs;

/// Which acquisition phase a batch of timestamps belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Laser off: only the number of timestamps is kept.
    Background,
    /// Laser on: timestamps are counted and summed.
    Total,
}

/// Per-pixel estimator state: two counters and one timestamp accumulator.
///
/// Counters saturate at `2^counter_bits - 1` and the accumulator at its
/// optional limit; either event sets [`overflow`](Self::overflow), after
/// which estimates are reported invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccumulatorState {
    n_bg: u64,
    n_tot: u64,
    sum_t_tot: u64,
    sum_t_bg: Option<u64>,
    counter_max: u64,
    sum_max: u64,
    overflow: bool,
}

impl Default for AccumulatorState {
    fn default() -> Self {
        Self::new()
    }
}

impl AccumulatorState {
    /// 16-bit counters and an unbounded accumulator.
    pub fn new() -> Self {
        AccumulatorState {
            n_bg: 0,
            n_tot: 0,
            sum_t_tot: 0,
            sum_t_bg: None,
            counter_max: u64::from(u16::MAX),
            sum_max: u64::MAX,
            overflow: false,
        }
    }

    pub fn with_counter_bits(self, bits: u32) -> Self {
        let counter_max = if bits >= 64 { u64::MAX } else { (1u64 << bits) - 1 };
        AccumulatorState {
            counter_max,
            ..self
        }
    }

    /// Largest representable accumulator value, in picoseconds.
    pub fn with_accumulator_limit(self, max_ps: u64) -> Self {
        AccumulatorState {
            sum_max: max_ps,
            ..self
        }
    }

    /// Also sums background timestamps, as needed by
    /// [`estimate_tof_full`](super::estimate_tof_full).
    pub fn with_background_sum(self) -> Self {
        AccumulatorState {
            sum_t_bg: Some(self.sum_t_bg.unwrap_or(0)),
            ..self
        }
    }

    pub fn n_bg(&self) -> u64 {
        self.n_bg
    }

    pub fn n_tot(&self) -> u64 {
        self.n_tot
    }

    /// Sum of total-phase timestamps, in picoseconds.
    pub fn sum_t_tot(&self) -> u64 {
        self.sum_t_tot
    }

    pub fn sum_t_bg(&self) -> Option<u64> {
        self.sum_t_bg
    }

    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn counter_max(&self) -> u64 {
        self.counter_max
    }

    /// Mean total-phase timestamp in seconds, if any were recorded.
    pub fn mean_t_tot(&self) -> Option<f64> {
        (self.n_tot > 0).then(|| self.sum_t_tot as f64 / self.n_tot as f64 * 1e-12)
    }

    pub fn mean_t_bg(&self) -> Option<f64> {
        match self.sum_t_bg {
            Some(sum) if self.n_bg > 0 => Some(sum as f64 / self.n_bg as f64 * 1e-12),
            _ => None,
        }
    }

    fn add(&mut self, value: u64, into: Slot) {
        let (slot, max) = match into {
            Slot::NBg => (&mut self.n_bg, self.counter_max),
            Slot::NTot => (&mut self.n_tot, self.counter_max),
            Slot::SumTot => (&mut self.sum_t_tot, self.sum_max),
            Slot::SumBg => match self.sum_t_bg.as_mut() {
                Some(s) => (s, self.sum_max),
                None => return,
            },
        };
        match slot.checked_add(value) {
            Some(v) if v <= max => *slot = v,
            _ => {
                *slot = max;
                self.overflow = true;
            }
        }
    }

    pub fn accumulate(&mut self, times: &[TimePs], phase: Phase) {
        let n = times.len() as u64;
        let sum = times.iter().fold(0u64, |acc, t| acc.saturating_add(t.ps()));
        match phase {
            Phase::Background => {
                self.add(n, Slot::NBg);
                self.add(sum, Slot::SumBg);
            }
            Phase::Total => {
                self.add(n, Slot::NTot);
                self.add(sum, Slot::SumTot);
            }
        }
    }

    /// Combines two states as if their timestamps had gone into one.
    ///
    /// Associative and commutative, so windows can be reduced in parallel.
    /// Both states must share the same widths.
    pub fn merge(&self, other: &AccumulatorState) -> AccumulatorState {
        let mut out = *self;
        out.overflow |= other.overflow;
        out.add(other.n_bg, Slot::NBg);
        out.add(other.n_tot, Slot::NTot);
        out.add(other.sum_t_tot, Slot::SumTot);
        if let Some(s) = other.sum_t_bg {
            if out.sum_t_bg.is_none() {
                out.sum_t_bg = Some(0);
            }
            out.add(s, Slot::SumBg);
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Slot {
    NBg,
    NTot,
    SumTot,
    SumBg,
}
