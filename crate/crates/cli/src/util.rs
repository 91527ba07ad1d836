use anyhow::Result;
use serde::Serialize;

/// `n` points spaced evenly in log10 between `lo` and `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| {
            // Snap to the exact endpoints so grids contain e.g. 1e8 itself.
            match i {
                0 => lo,
                _ if i == n - 1 => hi,
                _ => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
            }
        })
        .collect()
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Where `ys` first crosses `level`, interpolating linearly in log-log
/// space between grid points. `None` if it never does.
pub fn log_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        if (y[0] - level) * (y[1] - level) > 0.0 || y[0] == y[1] {
            return None;
        }
        let (lx0, lx1) = (x[0].ln(), x[1].ln());
        let (ly0, ly1, l) = (y[0].ln(), y[1].ln(), level.ln());
        Some((lx0 + (l - ly0) * (lx1 - lx0) / (ly1 - ly0)).exp())
    })
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}
