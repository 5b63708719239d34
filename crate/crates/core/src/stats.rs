//! Small numeric helpers shared by the bound scans and the Monte-Carlo check.

/// Least-squares slope of `ln y` against `ln x`.
///
/// Returns `None` for fewer than two points or any non-positive value.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Sample mean and unbiased sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// `count` points per decade from `10^lo` to `10^hi` inclusive.
pub fn log_grid(lo: i32, hi: i32, per_decade: u32) -> Vec<f64> {
    if hi < lo || per_decade == 0 {
        return Vec::new();
    }
    let steps = (hi - lo) as u32 * per_decade;
    (0..=steps)
        .map(|k| 10f64.powf(lo as f64 + k as f64 / per_decade as f64))
        .collect()
}
