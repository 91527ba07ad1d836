use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::SceneConfig;
use crate::TimePs;

/// One realization of the photon arrivals in a single acquisition window,
/// sorted and quantized to picoseconds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhotonStream {
    pub times: Vec<TimePs>,
}

impl PhotonStream {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> Option<TimePs> {
        self.times.first().copied()
    }
}

/// Quantizes sorted arrival times to picoseconds, keeping every photon:
/// a sample that lands on an already used picosecond moves to the next one.
pub(crate) fn quantize_sorted(times: &[f64], t_acq: f64) -> Vec<TimePs> {
    let limit = TimePs::from_seconds(t_acq).ps();
    let mut out: Vec<u64> = Vec::with_capacity(times.len());
    for &t in times {
        let mut ps = TimePs::from_seconds(t).ps().min(limit);
        if let Some(&prev) = out.last() {
            if ps <= prev {
                ps = prev + 1;
            }
        }
        out.push(ps);
    }
    // Collisions at the very end of the window can push past the limit;
    // walk back so the sequence stays inside it.
    let mut ceiling = limit;
    for ps in out.iter_mut().rev() {
        if *ps > ceiling {
            *ps = ceiling;
        }
        ceiling = ps.saturating_sub(1);
    }
    out.into_iter().map(TimePs).collect()
}

/// Draws a full photon stream: a Poisson number of photons, each placed by
/// inverting the window-normalised cumulative intensity.
pub fn sample_photon_stream<R: Rng + ?Sized>(scene: &SceneConfig, rng: &mut R) -> PhotonStream {
    let total = scene.total_photons();
    if total <= 0.0 {
        return PhotonStream::default();
    }
    let count = Poisson::new(total)
        .expect("positive finite mean")
        .sample(rng) as usize;
    let mut times: Vec<f64> = (0..count)
        .map(|_| {
            let y = rng.random::<f64>() * total;
            scene
                .inverse_cumulative(y)
                .expect("target inside cumulative range")
        })
        .collect();
    times.sort_by(f64::total_cmp);
    PhotonStream {
        times: quantize_sorted(&times, scene.t_acq()),
    }
}

/// Samples only the earliest arrival of a fresh window, optionally
/// restricted to times strictly after `after` seconds.
///
/// Equivalent in law to drawing a whole [`PhotonStream`] and taking the
/// first photon past `after`, but costs a single exponential draw. Returns
/// `None` when the window holds no such photon.
pub fn sample_first_arrival<R: Rng + ?Sized>(
    scene: &SceneConfig,
    after: Option<f64>,
    rng: &mut R,
) -> Option<f64> {
    let start = after.map_or(0.0, |a| scene.cumulative_intensity(a));
    let exposure: f64 = Exp1.sample(rng);
    scene.inverse_cumulative(start + exposure)
}
