//! Least-squares slope fits for convergence orders.

use crate::error::{Error, Result};

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::Invalid("a slope fit needs at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Invalid("log-log fit needs positive finite data"));
    }
    let n = xs.len() as f64;
    let lx = xs.iter().map(|x| libm::log(*x));
    let ly = ys.iter().map(|y| libm::log(*y));
    let (sx, sy, sxx, sxy) = lx.zip(ly).fold((0.0, 0.0, 0.0, 0.0), |(sx, sy, sxx, sxy), (x, y)| {
        (sx + x, sy + y, sxx + x * x, sxy + x * y)
    });
    let denom = n * sxx - sx * sx;
    if denom.abs() < f64::EPSILON {
        return Err(Error::Invalid("abscissae are all equal"));
    }
    Ok((n * sxy - sx * sy) / denom)
}
