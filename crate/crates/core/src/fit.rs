//! Least-squares exponent fitting on log-log data.

/// Slope of the least-squares line through `(ln x, ln y)`.
/// Points with nonpositive coordinates are skipped; `NaN` if fewer than two remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_laws() {
        let xs: Vec<f64> = (1..8).map(|k| (k as f64).exp2()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.25)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.25).abs() < 1e-12);
        assert!(loglog_slope(&xs[..1], &ys[..1]).is_nan());
    }
}
