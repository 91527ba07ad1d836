//! Per-pixel memory of the histogram-less method against a histogram.

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::util::csv_bytes;
use crate::{Check, Experiment, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemorySpec {
    pub tdc_bits: u32,
    pub histogram_depth_bits: u32,
    pub counter_bits: u32,
}

impl MemorySpec {
    pub fn new(tdc_bits: u32) -> Self {
        MemorySpec {
            tdc_bits,
            histogram_depth_bits: 8,
            counter_bits: 16,
        }
    }

    /// Two counters plus the TDC word and a double-width accumulator.
    pub fn ours_bits(&self) -> u64 {
        2 * u64::from(self.counter_bits) + 3 * u64::from(self.tdc_bits)
    }

    pub fn standard_bits(&self) -> u64 {
        (1u64 << self.tdc_bits) * u64::from(self.histogram_depth_bits)
    }

    pub fn ratio(&self) -> f64 {
        self.standard_bits() as f64 / self.ours_bits() as f64
    }

    fn wider(&self) -> Self {
        MemorySpec {
            tdc_bits: self.tdc_bits + 1,
            ..*self
        }
    }

    /// Relative growth of our memory when one TDC bit doubles the range.
    pub fn ours_doubling_delta(&self) -> f64 {
        self.wider().ours_bits() as f64 / self.ours_bits() as f64 - 1.0
    }

    pub fn standard_doubling_delta(&self) -> f64 {
        self.wider().standard_bits() as f64 / self.standard_bits() as f64 - 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Memory {
    pub specs: Vec<MemorySpec>,
}

impl Default for Memory {
    fn default() -> Self {
        Memory {
            specs: (9..=16).map(MemorySpec::new).collect(),
        }
    }
}

#[derive(Serialize)]
struct Row {
    tdc_bits: u32,
    histogram_depth_bits: u32,
    counter_bits: u32,
    ours_bits: u64,
    standard_bits: u64,
    ratio: f64,
    ours_doubling_delta: f64,
    standard_doubling_delta: f64,
}

impl Experiment for Memory {
    const NAME: &'static str = "memory";

    fn run(&self, _seed: u64) -> Result<Outcome> {
        ensure!(!self.specs.is_empty(), "no memory specs given");
        for s in &self.specs {
            ensure!(
                s.tdc_bits > 0 && s.tdc_bits < 48 && s.histogram_depth_bits > 0 && s.counter_bits > 0,
                "memory spec fields must be positive: {s:?}"
            );
        }
        let rows: Vec<Row> = self
            .specs
            .iter()
            .map(|s| Row {
                tdc_bits: s.tdc_bits,
                histogram_depth_bits: s.histogram_depth_bits,
                counter_bits: s.counter_bits,
                ours_bits: s.ours_bits(),
                standard_bits: s.standard_bits(),
                ratio: s.ratio(),
                ours_doubling_delta: s.ours_doubling_delta(),
                standard_doubling_delta: s.standard_doubling_delta(),
            })
            .collect();

        let max = MemorySpec::new(16);
        let min = MemorySpec::new(9);
        let step = MemorySpec::new(15);
        let checks = vec![
            Check::new(
                "ratio_16_bits",
                max.ratio() == 6553.6,
                format!("{} / {} = {}", max.standard_bits(), max.ours_bits(), max.ratio()),
            ),
            Check::new(
                "ratio_9_bits",
                (min.ratio() - 69.4).abs() <= 0.05,
                format!("{} / {} = {:.4}", min.standard_bits(), min.ours_bits(), min.ratio()),
            ),
            Check::new(
                "range_doubling_15_bits",
                (step.ours_doubling_delta() - 0.039).abs() < 0.0005
                    && step.standard_doubling_delta() == 1.0,
                format!(
                    "ours +{:.2}%, histogram +{:.0}%",
                    100.0 * step.ours_doubling_delta(),
                    100.0 * step.standard_doubling_delta()
                ),
            ),
        ];
        Ok(Outcome {
            files: vec![("memory.csv".into(), csv_bytes(&rows)?)],
            results: json!({ "rows": rows.len() }),
            checks,
        })
    }
}
