//! Least-squares rate fits on log-log data.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Errors below this are treated as having hit the quadrature floor.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Minimum number of usable rows for a fit.
pub const MIN_ROWS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Rows used after dropping floor-level and non-finite errors.
    pub used: usize,
    pub excluded: usize,
}

impl RateFit {
    /// A fit is conclusive when `R² ≥ 0.9`.
    pub fn conclusive(&self) -> bool {
        self.r_squared >= 0.9
    }
}

/// Ordinary least squares of `ln error` against `ln n` over rows `(n, error)`.
pub fn fit_rate(rows: &[(f64, f64)]) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, e)| *n > 0.0 && e.is_finite() && *e >= ERROR_FLOOR)
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    if pts.len() < MIN_ROWS {
        return Err(Error::DegenerateFit { usable: pts.len() });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { usable: pts.len() });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit { slope, intercept, r_squared, used: pts.len(), excluded: rows.len() - pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let rows: Vec<(f64, f64)> = (6..=12).map(|k| (2f64.powi(k), 2f64.powi(k).powf(-1.0))).collect();
        let f = fit_rate(&rows).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-6 && f.r_squared > 0.999999);
        let rows: Vec<(f64, f64)> = (6..=12).map(|k| (2f64.powi(k), 7.0 * 2f64.powi(k).powf(-0.75))).collect();
        let f = fit_rate(&rows).unwrap();
        assert!((f.slope + 0.75).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_factor() {
        let rows: Vec<(f64, f64)> = (6..=12).map(|k| {
            let n = 2f64.powi(k);
            (n, n.ln() / n)
        }).collect();
        let s = fit_rate(&rows).unwrap().slope;
        assert!(s > -1.0 && s < -0.8, "{s}");
    }

    #[test]
    fn degenerate() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 0.5)]), Err(Error::DegenerateFit { usable: 2 })));
        let floor: Vec<(f64, f64)> = (1..8).map(|k| (k as f64, 1e-14)).collect();
        assert!(matches!(fit_rate(&floor), Err(Error::DegenerateFit { usable: 0 })));
    }
}
