//! Timestamp histograms and their on-disk formats.
//!
//! Histograms are never needed by the estimator itself; they serve as
//! baselines, oracles and as the container that sensor data arrives in.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, TimePs};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    bin_width_ps: u64,
    counts: Vec<u32>,
    depth_limit: Option<u32>,
    saturated: bool,
}

impl Histogram {
    /// An empty histogram of `bins` bins of `bin_width` seconds.
    pub fn new(bin_width: f64, bins: usize, depth_limit: Option<u32>) -> Result<Self> {
        let bin_width_ps = bin_width_ps(bin_width)?;
        Ok(Histogram {
            bin_width_ps,
            counts: vec![0; bins],
            depth_limit,
            saturated: false,
        })
    }

    pub fn from_counts(bin_width: f64, counts: Vec<u32>) -> Result<Self> {
        Ok(Histogram {
            bin_width_ps: bin_width_ps(bin_width)?,
            counts,
            depth_limit: None,
            saturated: false,
        })
    }

    pub fn bin_width(&self) -> f64 {
        TimePs(self.bin_width_ps).as_seconds()
    }

    pub fn bin_width_ps(&self) -> u64 {
        self.bin_width_ps
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn depth_limit(&self) -> Option<u32> {
        self.depth_limit
    }

    /// True once any bin has hit the depth limit.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    /// Time covered by the bins, in picoseconds.
    pub fn range_ps(&self) -> u64 {
        self.bin_width_ps * self.counts.len() as u64
    }

    pub fn bin_start(&self, bin: usize) -> TimePs {
        TimePs(bin as u64 * self.bin_width_ps)
    }

    pub fn bin_center(&self, bin: usize) -> TimePs {
        TimePs(bin as u64 * self.bin_width_ps + self.bin_width_ps / 2)
    }

    /// Adds one timestamp, saturating at the depth limit.
    pub fn insert(&mut self, t: TimePs) -> Result<()> {
        let bin = (t.ps() / self.bin_width_ps) as usize;
        let range_ps = self.range_ps();
        let slot = self
            .counts
            .get_mut(bin)
            .ok_or(Error::OutOfRange { ps: t.ps(), range_ps })?;
        match self.depth_limit {
            Some(limit) if *slot >= limit => self.saturated = true,
            _ => *slot = slot.saturating_add(1),
        }
        Ok(())
    }

    /// Indices of the bins whose start lies in `[start, end)` seconds.
    pub fn bins_in(&self, start: f64, end: f64) -> std::ops::Range<usize> {
        let w = self.bin_width_ps as f64;
        let lo = (TimePs::from_seconds(start).ps() as f64 / w).ceil() as usize;
        let hi = (TimePs::from_seconds(end).ps() as f64 / w).ceil() as usize;
        lo.min(self.len())..hi.min(self.len())
    }

    /// Writes `bin_index,bin_start_ps,count` rows for every bin.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_index", "bin_start_ps", "count"])?;
        for (i, &c) in self.counts.iter().enumerate() {
            w.serialize((i, self.bin_start(i).ps(), c))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv).
    ///
    /// Rows must be listed by increasing index; missing indices read as empty
    /// bins. The bin width is recovered from the first row with a non-zero
    /// index.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["bin_index", "bin_start_ps", "count"] {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header bin_index,bin_start_ps,count".into(),
            });
        }
        let mut rows: Vec<(usize, u64, u32)> = Vec::new();
        for row in r.deserialize() {
            rows.push(row?);
        }
        let width = rows
            .iter()
            .find(|(i, _, _)| *i > 0)
            .map(|&(i, start, _)| start / i as u64)
            .ok_or(Error::Parse {
                line: 2,
                msg: "need a row with a non-zero bin index to recover the bin width".into(),
            })?;
        let bins = rows.last().map_or(0, |&(i, _, _)| i + 1);
        let mut counts = vec![0u32; bins];
        let mut previous: Option<usize> = None;
        for (line, &(i, start, c)) in rows.iter().enumerate() {
            if previous.is_some_and(|p| i <= p) || start != i as u64 * width {
                return Err(Error::Parse {
                    line: line + 2,
                    msg: format!("inconsistent row {i},{start},{c}"),
                });
            }
            counts[i] = c;
            previous = Some(i);
        }
        Ok(Histogram {
            bin_width_ps: width.max(1),
            counts,
            depth_limit: None,
            saturated: false,
        })
    }
}

fn bin_width_ps(bin_width: f64) -> Result<u64> {
    let ps = TimePs::from_seconds(bin_width).ps();
    if bin_width.is_nan() || bin_width <= 0.0 || ps == 0 {
        return Err(Error::InvalidConfig(format!(
            "bin width must be at least 1 ps, got {bin_width}"
        )));
    }
    Ok(ps)
}

/// Bins `times` with `bin_width` seconds.
///
/// With `bins = None` the histogram is sized to just cover the largest
/// timestamp; otherwise timestamps past the last bin are a range error.
pub fn build_histogram(
    times: &[TimePs],
    bin_width: f64,
    bins: Option<usize>,
    depth_limit: Option<u32>,
) -> Result<Histogram> {
    let width = bin_width_ps(bin_width)?;
    let bins = bins.unwrap_or_else(|| {
        times
            .iter()
            .max()
            .map_or(0, |t| (t.ps() / width) as usize + 1)
    });
    let mut h = Histogram::new(bin_width, bins, depth_limit)?;
    for &t in times {
        h.insert(t)?;
    }
    Ok(h)
}

/// Unpacks a histogram into one bin-centre timestamp per count and shuffles
/// the result, giving an exchangeable realization of the recorded times.
pub fn replay_histogram<R: Rng + ?Sized>(h: &Histogram, rng: &mut R) -> Vec<TimePs> {
    let mut out = Vec::with_capacity(h.total() as usize);
    for (i, &c) in h.counts().iter().enumerate() {
        let center = h.bin_center(i);
        out.extend(std::iter::repeat_n(center, c as usize));
    }
    out.shuffle(rng);
    out
}

/// Writes one integer picosecond value per line.
pub fn write_timestamps<W: Write>(mut writer: W, times: &[TimePs]) -> Result<()> {
    for t in times {
        writeln!(writer, "{}", t.ps())?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads the format produced by [`write_timestamps`]. Blank lines are skipped.
pub fn read_timestamps<R: BufRead>(reader: R) -> Result<Vec<TimePs>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let ps = trimmed.parse::<u64>().map_err(|e| Error::Parse {
            line: i + 1,
            msg: format!("{trimmed:?}: {e}"),
        })?;
        out.push(TimePs(ps));
    }
    Ok(out)
}
