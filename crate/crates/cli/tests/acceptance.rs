//! Acceptance harness: one line per criterion, with its runtime budget.
//!
//! Run with `cargo test -p spadlin-cli --test acceptance`. Exits nonzero if a
//! criterion fails that is not listed as a known limitation.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use spadlin::detectors::{acquire_or_discard_run, time_gated_run, DetectorConfig, LinearizedRun};
use spadlin::estimation::{estimate_from_scene, naive_difference_estimate, CalibrationData, TwoPhasePlan};
use spadlin::detectors::{sample_first_photon, Scheme};
use spadlin::photon_model::{alpha, laser_mean_time, linear_mean, tof_from_mu, LaserPulse, SceneConfig};
use spadlin::rng::{stream_id, stream_rng, SimRng};
use spadlin::stats::{ks_p_value, ks_statistic, one_sample_t_test};
use spadlin_cli::commands::{
    efficiency::Efficiency, linearize_bg::LinearizeBg, maxflux::MaxFlux, memory::Memory,
    pileup::Pileup, sweep::Sweep,
};
use spadlin_cli::{Experiment, Outcome, DEFAULT_SEED};

type Verdict = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    /// Fails for statistical reasons at the prescribed scale.
    known_limitation: bool,
    run: fn() -> Verdict,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "round-trip identity", budget: secs(1), known_limitation: false, run: round_trip },
        Criterion { id: 2, name: "linearization distribution", budget: secs(30), known_limitation: false, run: linearization },
        Criterion { id: 3, name: "rate grid recovery", budget: secs(120), known_limitation: true, run: rate_grid },
        Criterion { id: 4, name: "scheme efficiency", budget: secs(120), known_limitation: false, run: efficiency },
        Criterion { id: 5, name: "pile-up recovery", budget: secs(30), known_limitation: false, run: pileup },
        Criterion { id: 6, name: "background-rate recovery", budget: secs(60), known_limitation: false, run: background_rate },
        Criterion { id: 7, name: "memory calculator", budget: secs(1), known_limitation: false, run: memory },
        Criterion { id: 8, name: "max-flux solver", budget: secs(1), known_limitation: false, run: maxflux },
        Criterion { id: 9, name: "estimator bias", budget: secs(60), known_limitation: false, run: bias },
        Criterion { id: 10, name: "determinism across thread counts", budget: secs(300), known_limitation: false, run: determinism },
    ];
    let mut unexpected = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.run)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match verdict {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > c.budget {
            passed = false;
            detail = format!("over budget; {detail}");
        }
        let status = match (passed, c.known_limitation) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known limitation)",
            (false, false) => "FAIL",
        };
        println!(
            "{status} [{:>2}] {} ({:.2} s, budget {} s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
        if !passed && !c.known_limitation {
            unexpected.push(c.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn checks(outcome: &Outcome, names: &[&str]) -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in names {
        let c = outcome
            .check(name)
            .ok_or_else(|| format!("missing check {name}"))?;
        ok &= c.passed;
        lines.push(format!("{name}: {}", c.detail));
    }
    let text = lines.join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

fn run<E: Experiment>(cfg: E) -> Result<Outcome, String> {
    cfg.run(DEFAULT_SEED).map_err(|e| format!("{e:#}"))
}

fn round_trip() -> Verdict {
    let mut rng = stream_rng(1, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let width = rng.random_range(0.5e-9..8e-9);
        let photons = 10f64.powf(rng.random_range(-2.0..1.5));
        let pulse = if rng.random_bool(0.5) {
            LaserPulse::rectangular(width, photons)
        } else {
            let center = rng.random_range(0.0..width);
            LaserPulse::truncated_gaussian(width, photons, center, rng.random_range(0.1..0.6) * width)
        };
        let tof = rng.random_range(1e-9..100e-9 - width);
        let lb = 10f64.powf(rng.random_range(5.0..9.0));
        let scene = SceneConfig::new(lb, pulse, tof, 100e-9).map_err(|e| e.to_string())?;
        let back = (|| {
            tof_from_mu(linear_mean(&scene)?, alpha(&scene)?, 100e-9, laser_mean_time(&pulse)?)
        })()
        .map_err(|e| e.to_string())?;
        worst = worst.max((back / tof - 1.0).abs());
    }
    let detail = format!("worst relative error {worst:.2e} over 100 scenes");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Linear-detector CDF of a rectangular-pulse scene, in closed form.
fn rect_cdf(lb: f64, photons: f64, tof: f64, width: f64, t_acq: f64) -> impl Fn(f64) -> f64 {
    move |t| {
        let t = t.clamp(0.0, t_acq);
        (lb * t + photons * ((t - tof) / width).clamp(0.0, 1.0)) / (lb * t_acq + photons)
    }
}

fn pooled(
    n: usize,
    seed: u64,
    mut window: impl FnMut(&mut SimRng) -> LinearizedRun,
) -> Vec<LinearizedRun> {
    let mut rng = stream_rng(seed, 0);
    let mut runs = Vec::new();
    let mut total = 0;
    while total < n {
        let r = window(&mut rng);
        total += r.times.len();
        runs.push(r);
    }
    runs
}

fn sorted_seconds(runs: &[LinearizedRun], n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.times.iter().map(|t| t.as_seconds()))
        .take(n)
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Probability integral transform of in-run gaps under the truncated
/// exponential law of the next arrival after the previous record.
fn gap_pit(runs: &[LinearizedRun], lb: f64, t_acq: f64, n: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n);
    for r in runs {
        let mut prev = 0.0;
        for t in &r.times {
            let t = t.as_seconds();
            let g = t - prev;
            u.push((-(-lb * g).exp_m1()) / (-(-lb * (t_acq - prev)).exp_m1()));
            prev = t;
        }
    }
    u.truncate(n);
    u.sort_by(f64::total_cmp);
    u
}

fn linearization() -> Verdict {
    const N: usize = 100_000;
    let (lb, photons, tof, width, t_acq) = (2e7, 2.0, 25e-9, 4e-9, 100e-9);
    let scene = SceneConfig::new(lb, LaserPulse::rectangular(width, photons), tof, t_acq)
        .map_err(|e| e.to_string())?;
    let cfg = DetectorConfig::default();
    let cdf = rect_cdf(lb, photons, tof, width, t_acq);
    let aod = pooled(N, 21, |rng| acquire_or_discard_run(&scene, &cfg, rng));
    let tg = pooled(N, 22, |rng| time_gated_run(&scene, &cfg, rng));
    let p_aod = ks_p_value(ks_statistic(&sorted_seconds(&aod, N), &cdf), N);
    let p_tg = ks_p_value(ks_statistic(&sorted_seconds(&tg, N), &cdf), N);

    let flat = scene.background_only().with_lambda_b(5e7).map_err(|e| e.to_string())?;
    let gaps_tg = gap_pit(&pooled(N, 23, |rng| time_gated_run(&flat, &cfg, rng)), 5e7, t_acq, N);
    let gaps_aod = gap_pit(&pooled(N, 24, |rng| acquire_or_discard_run(&flat, &cfg, rng)), 5e7, t_acq, N);
    let p_gap_tg = ks_p_value(ks_statistic(&gaps_tg, |u| u.clamp(0.0, 1.0)), gaps_tg.len());
    let p_gap_aod = ks_p_value(ks_statistic(&gaps_aod, |u| u.clamp(0.0, 1.0)), gaps_aod.len());
    let detail = format!(
        "KS p: acquire-or-discard {p_aod:.3}, time-gated {p_tg:.3}; gaps {p_gap_aod:.3}, {p_gap_tg:.3}"
    );
    if [p_aod, p_tg, p_gap_tg, p_gap_aod].iter().all(|&p| p > 0.01) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rate_grid() -> Verdict {
    checks(&run(Sweep::default())?, &["required_cells_recovered", "grid_complete"])
}

fn efficiency() -> Verdict {
    checks(&run(Efficiency::default())?, &["ratio_at_1e8", "aod_fps_cutoff"])
}

fn pileup() -> Verdict {
    checks(
        &run(Pileup::default())?,
        &["linearized_matches_linear_law", "first_photon_rejected"],
    )
}

fn background_rate() -> Verdict {
    checks(&run(LinearizeBg::default())?, &["full_dataset_recovery"])
}

fn memory() -> Verdict {
    checks(
        &run(Memory::default())?,
        &["ratio_16_bits", "ratio_9_bits", "range_doubling_15_bits"],
    )
}

fn maxflux() -> Verdict {
    checks(&run(MaxFlux::default())?, &["lambda_max", "ratio_to_pileup_rule"])
}

fn bias() -> Verdict {
    let tof = 25e-9;
    let bg = SceneConfig::new(1e8, LaserPulse::rectangular(4e-9, 0.0), tof, 1e-6)
        .map_err(|e| e.to_string())?;
    let cfg = DetectorConfig::default();
    let n = 100_000;
    let mean = |s: &SceneConfig, stream: u64| {
        let mut rng = stream_rng(91, stream);
        let v: Vec<f64> = (0..n)
            .filter_map(|_| sample_first_photon(s, &cfg, &mut rng))
            .map(|t| t.as_seconds())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let t_bg = mean(&bg, 0);
    let mut biases = Vec::new();
    for (k, rate) in [1e7, 1e8, 1e9].into_iter().enumerate() {
        let s = bg
            .with_pulse(LaserPulse::rectangular_rate(4e-9, rate))
            .map_err(|e| e.to_string())?;
        biases.push((naive_difference_estimate(mean(&s, k as u64 + 1), t_bg) - tof).abs());
    }
    let monotone = biases.windows(2).all(|w| w[1] > w[0]);

    let scene = SceneConfig::new(1e7, LaserPulse::rectangular_rate(4e-9, 1e8), tof, 100e-9)
        .map_err(|e| e.to_string())?;
    let calib = CalibrationData::from_pulse(scene.pulse()).map_err(|e| e.to_string())?;
    let plan = TwoPhasePlan::new(Scheme::TimeGated, 1_000);
    let estimates = (0..250u32)
        .map(|i| {
            let mut rng = stream_rng(92, stream_id(0, i));
            estimate_from_scene(&plan, &scene, &calib, &mut rng).map(|e| e.tof)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let t = one_sample_t_test(&estimates, tof);
    let detail = format!(
        "naive |bias| {:.2} / {:.2} / {:.2} ns; linearized t-test p = {:.3}",
        biases[0] * 1e9,
        biases[1] * 1e9,
        biases[2] * 1e9,
        t.p_value
    );
    if monotone && t.p_value > 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Small configurations so that every command can run twice.
const QUICK: &[(&str, &str)] = &[
    ("memory", "{}"),
    ("maxflux", "{}"),
    ("efficiency", r#"{"runs": 50}"#),
    ("pileup", r#"{"runs": 10000, "cycles": 20000}"#),
    ("sweep", r#"{"windows": 300}"#),
    ("range", r#"{"trials": 20, "windows": 2000, "distances": [1.0, 3.8]}"#),
    ("linearize-bg", r#"{"timestamps": 200000, "subsets": 20}"#),
];

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .map(|d| {
            d.filter_map(|e| e.ok())
                .map(|e| {
                    let bytes = std::fs::read(e.path()).unwrap_or_default();
                    (e.file_name().to_string_lossy().into_owned(), bytes)
                })
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

fn determinism() -> Verdict {
    let root: PathBuf = std::env::temp_dir().join(format!("spadlin-acceptance-{}", std::process::id()));
    let mut differing = Vec::new();
    for (cmd, cfg) in QUICK {
        let cfg_path = root.join(format!("{cmd}.json"));
        std::fs::create_dir_all(&root).map_err(|e| e.to_string())?;
        std::fs::write(&cfg_path, cfg).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for threads in [1, 4] {
            let out = root.join(format!("{cmd}-{threads}"));
            let status = Command::new(env!("CARGO_BIN_EXE_spadlin"))
                .arg(cmd)
                .arg("--config")
                .arg(&cfg_path)
                .arg("--seed")
                .arg("7")
                .arg("--threads")
                .arg(threads.to_string())
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if status.status.code() == Some(2) {
                return Err(format!("{cmd}: {}", String::from_utf8_lossy(&status.stderr)));
            }
            outputs.push(files(&out));
        }
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            differing.push(*cmd);
        }
    }
    let _ = std::fs::remove_dir_all(&root);
    if differing.is_empty() {
        Ok(format!("{} commands byte-identical with 1 and 4 threads", QUICK.len()))
    } else {
        Err(format!("outputs differ for {differing:?}"))
    }
}
