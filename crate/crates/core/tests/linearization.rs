mod common;

use common::{poisson_rate_z, rect_linear_cdf, seconds};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use spadlin::detectors::{
    acquire_or_discard_from_timestamps, acquire_or_discard_run, build_histogram,
    cumulative_sum_linearize, replay_histogram, sample_first_photon, time_gated_run,
    DetectorConfig, ReplayOptions, RunStats,
};
use spadlin::photon_model::{linear_cdf, LaserPulse, SceneConfig};
use spadlin::rng::stream_rng;
use spadlin::stats::{chi_square_gof, ks_critical_value, ks_statistic};
use spadlin::TimePs;

fn pooled<F>(target: usize, mut run: F) -> Vec<f64>
where
    F: FnMut() -> Vec<TimePs>,
{
    let mut pool = Vec::with_capacity(target + 64);
    while pool.len() < target {
        pool.extend(run());
    }
    seconds(&pool)
}

#[test]
fn both_schemes_follow_the_linear_law() {
    let scenes = [
        SceneConfig::new(2e7, LaserPulse::rectangular(4e-9, 1.5), 25e-9, 100e-9).unwrap(),
        SceneConfig::new(
            1e7,
            LaserPulse::truncated_gaussian(4e-9, 2.3, 1.2e-9, 0.6e-9),
            60e-9,
            100e-9,
        )
        .unwrap(),
    ];
    let cfg = DetectorConfig::default();
    for (k, s) in scenes.iter().enumerate() {
        let cdf = |t: f64| linear_cdf(s, t).unwrap();
        let mut rng = stream_rng(300, k as u64);
        let xs = pooled(100_000, || acquire_or_discard_run(s, &cfg, &mut rng).times);
        let d = ks_statistic(&xs, cdf);
        assert!(d < ks_critical_value(xs.len(), 0.01), "acquire-or-discard D = {d}");

        let xs = pooled(100_000, || time_gated_run(s, &cfg, &mut rng).times);
        let d = ks_statistic(&xs, cdf);
        assert!(d < ks_critical_value(xs.len(), 0.01), "time-gated D = {d}");
    }
}

#[test]
fn oracle_cdf_agrees_with_library() {
    let s = SceneConfig::new(2e7, LaserPulse::rectangular(4e-9, 1.5), 25e-9, 100e-9).unwrap();
    let oracle = rect_linear_cdf(2e7, 1.5, 25e-9, 4e-9, 100e-9);
    for k in 0..=200 {
        let t = k as f64 * 0.5e-9;
        assert!((oracle(t) - linear_cdf(&s, t).unwrap()).abs() < 1e-12);
    }
}

/// Probability-integral transform of each gap given the previous record:
/// uniform exactly when the next record has the law of the next arrival
/// after the gate, conditioned on falling inside the window.
fn gap_pit(times: &[TimePs], lambda: f64, t_acq: f64, out: &mut Vec<f64>) {
    let mut prev = 0.0;
    for t in times {
        let t = t.as_seconds();
        let u = -(-lambda * (t - prev)).exp_m1() / -(-lambda * (t_acq - prev)).exp_m1();
        out.push(u);
        prev = t;
    }
}

#[test]
fn homogeneous_gaps_are_exponential() {
    let lambda = 1e8;
    let s = SceneConfig::new(lambda, LaserPulse::rectangular(4e-9, 0.0), 0.0, 100e-9).unwrap();
    let cfg = DetectorConfig::default();
    let mut rng = stream_rng(301, 0);
    let mut u = Vec::new();
    while u.len() < 100_000 {
        gap_pit(&time_gated_run(&s, &cfg, &mut rng).times, lambda, 100e-9, &mut u);
    }
    u.sort_by(f64::total_cmp);
    let d = ks_statistic(&u, |x| x.clamp(0.0, 1.0));
    assert!(d < ks_critical_value(u.len(), 0.01), "time-gated D = {d}");

    // Acquire-or-discard at a flux where it stays affordable.
    let lambda = 3e7;
    let s = s.with_lambda_b(lambda).unwrap();
    let mut u = Vec::new();
    while u.len() < 100_000 {
        gap_pit(&acquire_or_discard_run(&s, &cfg, &mut rng).times, lambda, 100e-9, &mut u);
    }
    u.sort_by(f64::total_cmp);
    let d = ks_statistic(&u, |x| x.clamp(0.0, 1.0));
    assert!(d < ks_critical_value(u.len(), 0.01), "acquire-or-discard D = {d}");

    // The first record of a long window is plain exponential.
    let s = SceneConfig::new(1e8, LaserPulse::rectangular(4e-9, 0.0), 0.0, 1e-6).unwrap();
    let mut first: Vec<f64> = (0..100_000)
        .map(|_| time_gated_run(&s, &cfg, &mut rng).times[0].as_seconds())
        .collect();
    first.sort_by(f64::total_cmp);
    let d = ks_statistic(&first, |t| -(-1e8 * t).exp_m1());
    assert!(d < ks_critical_value(first.len(), 0.01), "first gap D = {d}");
}

#[test]
fn acquire_or_discard_costs_more_and_more() {
    let cfg = DetectorConfig::default();
    let pulse = LaserPulse::rectangular(4e-9, 0.0);
    let mut last_ratio = 0.0;
    for (k, lb) in [1e7, 2e7, 4e7, 6e7, 8e7].into_iter().enumerate() {
        let s = SceneConfig::new(lb, pulse, 0.0, 100e-9).unwrap();
        let mut rng = stream_rng(302, k as u64);
        let runs = 400;
        let (mut aod, mut tg) = (RunStats::default(), RunStats::default());
        for _ in 0..runs {
            aod.merge(&acquire_or_discard_run(&s, &cfg, &mut rng).stats);
            tg.merge(&time_gated_run(&s, &cfg, &mut rng).stats);
        }
        // Expected cycles per run are e^{λT} against λT + 1.
        assert!(aod.acquisitions_used >= tg.acquisitions_used, "λ_B = {lb}");
        let ratio = aod.acquisitions_used as f64 / tg.acquisitions_used as f64;
        assert!(ratio > last_ratio, "ratio {ratio} after {last_ratio} at λ_B = {lb}");
        last_ratio = ratio;
    }
}

#[test]
fn pile_up_is_removed_by_linearization() {
    let s = SceneConfig::new(2e7, LaserPulse::rectangular(4e-9, 2.3), 40e-9, 100e-9).unwrap();
    let cfg = DetectorConfig::default();
    let mut rng = stream_rng(303, 0);
    // Equal 30 ns stretches before and after the pulse.
    let count = |times: &[TimePs]| {
        let before = times.iter().filter(|t| (5_000..35_000).contains(&t.ps())).count() as u64;
        let after = times.iter().filter(|t| (50_000..80_000).contains(&t.ps())).count() as u64;
        (before, after)
    };
    let first: Vec<TimePs> = (0..200_000)
        .filter_map(|_| sample_first_photon(&s, &cfg, &mut rng))
        .collect();
    let (b, a) = count(&first);
    assert!(a < b, "first photon: {a} after vs {b} before");
    assert!(poisson_rate_z(b, a) > 5.0);

    let mut lin = Vec::new();
    for _ in 0..40_000 {
        lin.extend(time_gated_run(&s, &cfg, &mut rng).times);
    }
    let (b, a) = count(&lin);
    assert!(poisson_rate_z(b, a).abs() < 2.576, "linearized: {a} after vs {b} before");
}

/// Untruncated first-arrival times of a homogeneous source, in picoseconds.
fn exponential_arrivals(lambda: f64, n: usize, seed: u64) -> Vec<TimePs> {
    let exp = Exp::new(lambda).unwrap();
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| TimePs::from_seconds(exp.sample(&mut rng)))
        .collect()
}

#[test]
fn replayed_background_linearizes_flat() {
    let lambda = 5e7;
    let data = exponential_arrivals(lambda, 400_000, 304);
    let h = build_histogram(&data, 100e-12, None, None).unwrap();
    let mut rng = stream_rng(304, 1);
    let replayed = replay_histogram(&h, &mut rng);
    let out = acquire_or_discard_from_timestamps(&replayed, &ReplayOptions::new(100e-9)).unwrap();
    assert!(out.consumed >= out.accepted);
    let accepted: Vec<TimePs> = out
        .complete_runs()
        .flat_map(|r| r.times.iter().copied())
        .collect();
    let lin = build_histogram(&accepted, 2e-9, Some(50), None).unwrap();
    let counts: Vec<u64> = lin.counts().iter().map(|&c| u64::from(c)).collect();
    let test = chi_square_gof(&counts, &[1.0; 50]);
    assert!(test.p_value > 0.01, "{test:?}");
}

#[test]
fn cumulative_sums_are_uniform() {
    let lambda = 8e7;
    let data = exponential_arrivals(lambda, 200_000, 305);
    let runs = cumulative_sum_linearize(&data, 100e-9);
    let pool: Vec<TimePs> = runs
        .iter()
        .filter(|r| r.is_complete())
        .flat_map(|r| r.times.iter().copied())
        .collect();
    let xs = seconds(&pool);
    let d = ks_statistic(&xs, |t| (t / 100e-9).clamp(0.0, 1.0));
    assert!(d < ks_critical_value(xs.len(), 0.01), "D = {d}");
    assert!(runs.iter().all(|r| r.times.windows(2).all(|w| w[0] < w[1])));
}

#[test]
fn quantized_schemes_stay_on_the_tdc_grid() {
    let s = SceneConfig::new(5e7, LaserPulse::rectangular(4e-9, 1.0), 30e-9, 100e-9).unwrap();
    let cfg = DetectorConfig::sensor();
    let mut rng = stream_rng(306, 0);
    for _ in 0..500 {
        for run in [
            time_gated_run(&s, &cfg, &mut rng),
            acquire_or_discard_run(&s, &cfg, &mut rng),
        ] {
            assert!(run.times.iter().all(|t| t.ps() % 100 == 50));
            assert!(run.times.windows(2).all(|w| w[0] < w[1]));
        }
    }
    let _ = rng.random::<u8>();
}
