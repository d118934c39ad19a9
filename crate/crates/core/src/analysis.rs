//! Helpers for convergence and work/precision studies.

/// Least-squares slope of `log(error)` against `log(h)` for step counts `steps`
/// over a fixed interval (so `h ∝ 1/n`).
pub fn fit_order(steps: &[usize], errors: &[f64]) -> f64 {
    assert_eq!(steps.len(), errors.len());
    assert!(steps.len() >= 2, "need at least two points");
    let xs: Vec<f64> = steps.iter().map(|&n| -(n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Piecewise-linear interpolation of `log y` over `log x`, extrapolating from the
/// end segments. `points` must be sorted by `x`.
pub fn loglog_interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    assert!(points.len() >= 2, "need at least two points");
    let i = points.partition_point(|p| p.0 < x).clamp(1, points.len() - 1);
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    let s = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    (y0.ln() + s * (y1.ln() - y0.ln())).exp()
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}
