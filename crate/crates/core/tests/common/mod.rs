//! Reference implementations shared by the integration tests. Nothing here
//! calls into the closed forms under test.

#![allow(dead_code)]

use rand::Rng;
use spadlin::photon_model::{LaserPulse, SceneConfig};
use spadlin::TimePs;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + h / 2.0;
        for &(x, w) in &rule {
            sum += w * f(mid + x * h / 2.0);
        }
    }
    sum * h / 2.0
}

/// Integrates over consecutive segments so that kinks and jumps of `f` sit
/// on panel edges.
pub fn integrate_segments(f: impl Fn(f64) -> f64 + Copy, edges: &[f64]) -> f64 {
    edges
        .windows(2)
        .filter(|e| e[1] > e[0])
        .map(|e| integrate(f, e[0], e[1], 8))
        .sum()
}

/// Breakpoints of the composite intensity of `scene` on `[0, t_acq]`.
pub fn scene_edges(scene: &SceneConfig) -> Vec<f64> {
    let start = scene.tof();
    let end = start + scene.pulse().width;
    vec![0.0, start, end.min(scene.t_acq()), scene.t_acq()]
}

/// Independent evaluation of the laser intensity at `t` relative to the
/// pulse start.
pub fn laser_intensity(pulse: &LaserPulse, t: f64) -> f64 {
    use spadlin::photon_model::PulseShape;
    if !(0.0..pulse.width).contains(&t) {
        return 0.0;
    }
    match pulse.shape {
        PulseShape::Rectangular => pulse.mean_photons / pulse.width,
        PulseShape::TruncatedGaussian { center, sigma } => {
            let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let cdf = |z: f64| 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2);
            let mass = cdf((pulse.width - center) / sigma) - cdf(-center / sigma);
            pulse.mean_photons * phi((t - center) / sigma) / (sigma * mass)
        }
    }
}

pub fn intensity(scene: &SceneConfig, t: f64) -> f64 {
    scene.lambda_b() + laser_intensity(scene.pulse(), t - scene.tof())
}

/// Normalised linear-regime density, by quadrature of the intensity.
pub fn linear_density(scene: &SceneConfig) -> impl Fn(f64) -> f64 + Copy + '_ {
    let total = integrate_segments(|t| intensity(scene, t), &scene_edges(scene));
    move |t| intensity(scene, t) / total
}

/// Rectangular-pulse linear CDF written out piecewise.
pub fn rect_linear_cdf(lb: f64, photons: f64, tof: f64, width: f64, t_acq: f64) -> impl Fn(f64) -> f64 {
    let total = lb * t_acq + photons;
    move |t: f64| {
        let t = t.clamp(0.0, t_acq);
        let laser = photons * ((t - tof) / width).clamp(0.0, 1.0);
        (lb * t + laser) / total
    }
}

/// Random valid scene with background and laser both present.
pub fn random_scene<R: Rng>(rng: &mut R) -> SceneConfig {
    let t_acq = 100e-9;
    let width = rng.random_range(0.5e-9..8e-9);
    let photons = 10f64.powf(rng.random_range(-2.0..1.5));
    let pulse = if rng.random_bool(0.5) {
        LaserPulse::rectangular(width, photons)
    } else {
        let center = rng.random_range(0.0..width);
        let sigma = rng.random_range(0.1..0.6) * width;
        LaserPulse::truncated_gaussian(width, photons, center, sigma)
    };
    let tof = rng.random_range(0.0..t_acq - width);
    let lb = 10f64.powf(rng.random_range(5.0..9.0));
    SceneConfig::new(lb, pulse, tof, t_acq).unwrap()
}

pub fn seconds(times: &[TimePs]) -> Vec<f64> {
    let mut v: Vec<f64> = times.iter().map(|t| t.as_seconds()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sided z-test that two Poisson counts over equal exposures share a
/// rate. Returns the z statistic.
pub fn poisson_rate_z(a: u64, b: u64) -> f64 {
    let (a, b) = (a as f64, b as f64);
    (a - b) / (a + b).sqrt()
}
