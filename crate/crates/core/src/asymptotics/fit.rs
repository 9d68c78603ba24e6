use serde::Serialize;
use thiserror::Error;

use crate::counter::CountSeries;

/// Least-squares line through `(ln N, ln count)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub slope: f64,
    /// `ln C` of the implied constant in `count ≈ C·N^slope`.
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least 3 usable points with positive count, have {0}")]
    TooFewPoints(usize),
}

/// Fits the growth exponent of a sweep, ignoring zero counts and sides below `min_n`.
pub fn fit_exponent(series: &CountSeries, min_n: u64) -> Result<FitReport, FitError> {
    let points: Vec<(f64, f64)> = series
        .points
        .iter()
        .filter(|p| p.count > 0 && p.side >= min_n)
        .map(|p| (p.side as f64, p.count as f64))
        .collect();
    fit_log_log(&points)
}

/// OLS on `(ln x, ln y)`. Points with non-positive coordinates are skipped.
pub fn fit_log_log(points: &[(f64, f64)]) -> Result<FitReport, FitError> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len();
    if n < 3 {
        return Err(FitError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(FitError::TooFewPoints(1));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = logs.iter().map(|&(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ssr / syy).clamp(0.0, 1.0) };
    let slope_stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(FitReport { slope, intercept, r_squared, slope_stderr, points_used: n })
}
