//! Least-squares convergence rates in log-log coordinates.

use crate::{Error, Result};

/// Minimum number of points a rate fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Exponent `s` in `q ~ C N^s`.
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln q = intercept + slope * ln n`. Points with non-positive or
/// non-finite values are rejected as errors.
pub fn fit_loglog(n: &[f64], q: &[f64]) -> Result<RateFit> {
    if n.len() != q.len() {
        return Err(Error::Dimension { expected: n.len(), got: q.len() });
    }
    if n.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData { needed: MIN_FIT_POINTS, got: n.len() });
    }
    if n.iter().chain(q).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter("rate fits need positive finite data"));
    }
    let m = n.len() as f64;
    let xs = n.iter().map(|&v| libm::log(v));
    let ys = q.iter().map(|&v| libm::log(v));
    let mx = xs.clone().sum::<f64>() / m;
    let my = ys.clone().sum::<f64>() / m;
    let (sxy, sxx) =
        xs.zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("rate fits need distinct element counts"));
    }
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, points: n.len() })
}
