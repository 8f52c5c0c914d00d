//! Ordinary least squares on `(x, y)` pairs.

use crate::error::{Error, Result};

/// Abscissae `n = round(10^{3 + k/2})`, `k = 0..=6`, used for every
/// log-log residual slope.
pub const GEOMETRIC_GRID: [usize; 7] = [1_000, 3_162, 10_000, 31_623, 100_000, 316_228, 1_000_000];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: {} abscissae, {} ordinates",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Insufficient(format!(
            "{} points for a line fit",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::Insufficient("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Slope of `ln|r|` against `ln n`. Zero residuals are dropped; at least
/// two nonzero points are required.
pub fn loglog_slope(ns: &[usize], residuals: &[f64]) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = ns
        .iter()
        .zip(residuals)
        .filter(|(_, r)| **r != 0.0 && r.is_finite())
        .map(|(&n, r)| ((n as f64).ln(), r.abs().ln()))
        .unzip();
    Ok(ols(&x, &y)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let f = ols(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, 1.0);
    }

    #[test]
    fn power_law() {
        let r: Vec<f64> = GEOMETRIC_GRID
            .iter()
            .map(|&n| 3.0 * (n as f64).powf(-1.4))
            .collect();
        assert_relative_eq!(
            loglog_slope(&GEOMETRIC_GRID, &r).unwrap(),
            -1.4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn degenerate_inputs() {
        assert!(ols(&[1.0], &[2.0]).is_err());
        assert!(ols(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(ols(&[1.0, 2.0], &[2.0]).is_err());
        assert!(loglog_slope(&[10, 100], &[0.0, 1.0]).is_err());
    }
}
