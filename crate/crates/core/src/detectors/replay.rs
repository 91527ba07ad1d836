//! Linearization of recorded first-photon data.
//!
//! Sensor data arrives as a sequence of first-arrival times, one per laser
//! cycle, typically recovered by replaying a histogram. Such data cannot
//! express an empty cycle directly, so the end of a run has to be inferred;
//! see [`ReplayOptions`].

use serde::{Deserialize, Serialize};

use super::{LinearizedRun, RunEnd, RunStats};
use crate::{Error, Result, TimePs};

/// Termination rules for [`acquire_or_discard_from_timestamps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayOptions {
    /// Linearization stops here, in seconds. A candidate later than the
    /// horizon counts as a cycle with no photon before it.
    pub horizon: f64,
    /// Width of the final bin before the horizon, in seconds. Recording a
    /// timestamp within it closes the run.
    pub epsilon: f64,
    /// A run is closed after this many consecutive discards; the next
    /// candidate then starts a new run.
    pub max_consecutive_discards: u64,
}

impl ReplayOptions {
    pub fn new(t_acq: f64) -> Self {
        ReplayOptions {
            horizon: t_acq,
            epsilon: 100e-12,
            max_consecutive_discards: 10_000,
        }
    }

    pub fn with_horizon(self, horizon: f64) -> Self {
        ReplayOptions { horizon, ..self }
    }

    pub fn with_max_consecutive_discards(self, max_consecutive_discards: u64) -> Self {
        ReplayOptions {
            max_consecutive_discards,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "replay horizon must be positive and epsilon non-negative, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub runs: Vec<LinearizedRun>,
    /// Candidates read from the input.
    pub consumed: u64,
    /// Candidates kept as linearized timestamps.
    pub accepted: u64,
}

impl ReplayOutcome {
    /// Candidates read per timestamp kept.
    pub fn data_reduction_factor(&self) -> f64 {
        self.consumed as f64 / self.accepted as f64
    }

    pub fn complete_runs(&self) -> impl Iterator<Item = &LinearizedRun> {
        self.runs.iter().filter(|r| r.is_complete())
    }
}

struct OpenRun {
    times: Vec<TimePs>,
    consumed: u64,
    discards: u64,
}

impl OpenRun {
    fn close(self, end: RunEnd) -> LinearizedRun {
        let recorded = self.times.len() as u64;
        LinearizedRun {
            times: self.times,
            stats: RunStats {
                acquisitions_used: self.consumed,
                raw_detections: self.consumed,
                recorded,
            },
            end,
        }
    }
}

/// Feeds recorded first arrivals through the acquire-or-discard rule.
///
/// Each candidate is one laser cycle. A candidate past the horizon ends the
/// current run (or stands for an empty window when no run is open); a
/// candidate later than the run's maximum is kept, anything else is
/// discarded.
pub fn acquire_or_discard_from_timestamps(
    relative_first_arrivals: &[TimePs],
    opts: &ReplayOptions,
) -> Result<ReplayOutcome> {
    opts.validate()?;
    let horizon = TimePs::from_seconds(opts.horizon);
    let covered = TimePs::from_seconds((opts.horizon - opts.epsilon).max(0.0));
    let mut runs = Vec::new();
    let mut open: Option<OpenRun> = None;

    for &t in relative_first_arrivals {
        let mut run = match open.take() {
            Some(run) => run,
            None => {
                let mut run = OpenRun {
                    times: Vec::new(),
                    consumed: 1,
                    discards: 0,
                };
                if t > horizon {
                    runs.push(run.close(RunEnd::Horizon));
                } else {
                    run.times.push(t);
                    if t >= covered {
                        runs.push(run.close(RunEnd::Covered));
                    } else {
                        open = Some(run);
                    }
                }
                continue;
            }
        };

        if t > horizon {
            run.consumed += 1;
            runs.push(run.close(RunEnd::Horizon));
            continue;
        }
        let latest = *run.times.last().expect("open runs hold a timestamp");
        if t > latest {
            run.consumed += 1;
            run.discards = 0;
            run.times.push(t);
            if t >= covered {
                runs.push(run.close(RunEnd::Covered));
            } else {
                open = Some(run);
            }
        } else if run.discards < opts.max_consecutive_discards {
            run.consumed += 1;
            run.discards += 1;
            open = Some(run);
        } else {
            // Limit reached: close the run and let this candidate start the next.
            runs.push(run.close(RunEnd::DiscardLimit));
            let mut next = OpenRun {
                times: vec![t],
                consumed: 1,
                discards: 0,
            };
            if t >= covered {
                runs.push(std::mem::replace(&mut next, OpenRun { times: Vec::new(), consumed: 0, discards: 0 }).close(RunEnd::Covered));
            } else {
                open = Some(next);
            }
        }
    }
    if let Some(run) = open {
        runs.push(run.close(RunEnd::Incomplete));
    }
    let consumed = relative_first_arrivals.len() as u64;
    let accepted = runs.iter().map(|r| r.stats.recorded).sum();
    Ok(ReplayOutcome {
        runs,
        consumed,
        accepted,
    })
}

/// Emulates the time-gated scheme on background-only first-arrival data by
/// chaining relative arrivals into absolute ones.
///
/// Valid only when the data come from a single homogeneous source: then the
/// time to the next photon after any instant is again exponential with the
/// same rate. Each input element is one gated cycle; the element whose
/// running sum crosses `t_acq` plays the empty cycle and closes the run.
pub fn cumulative_sum_linearize(relative_first_arrivals: &[TimePs], t_acq: f64) -> Vec<LinearizedRun> {
    let limit = TimePs::from_seconds(t_acq).ps();
    let mut runs = Vec::new();
    let mut times: Vec<TimePs> = Vec::new();
    let mut consumed = 0u64;
    let mut clock = 0u64;
    for &dt in relative_first_arrivals {
        consumed += 1;
        // A zero gap is a quantization collision; keep timestamps distinct.
        clock = clock.saturating_add(dt.ps().max(1));
        if clock > limit {
            let recorded = times.len() as u64;
            runs.push(LinearizedRun {
                times: std::mem::take(&mut times),
                stats: RunStats {
                    acquisitions_used: consumed,
                    raw_detections: consumed,
                    recorded,
                },
                end: RunEnd::WindowExhausted,
            });
            consumed = 0;
            clock = 0;
        } else {
            times.push(TimePs(clock));
        }
    }
    if consumed > 0 {
        let recorded = times.len() as u64;
        runs.push(LinearizedRun {
            times,
            stats: RunStats {
                acquisitions_used: consumed,
                raw_detections: consumed,
                recorded,
            },
            end: RunEnd::Incomplete,
        });
    }
    runs
}
