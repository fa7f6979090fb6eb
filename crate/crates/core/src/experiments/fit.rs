//! Least-squares fits, ladders and summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Line `y = slope·x + intercept` with the RMS of its residuals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain("a line fit needs at least two paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(domain("degenerate abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(LinearFit { slope, intercept, residual: (ss / n).sqrt() })
}

/// Fit `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// `start · ratioⁱ` for `i < count`; values within 1e-9 of an integer are
/// snapped to it so that `10 · (10^¼)⁴` is exactly `100`.
pub fn geometric_ladder(start: f64, ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0) || !(ratio > 1.0) || count == 0 {
        return Err(domain("ladder needs start > 0, ratio > 1 and count ≥ 1"));
    }
    Ok((0..count)
        .map(|i| {
            let t = start * ratio.powi(i as i32);
            let r = t.round();
            if (t - r).abs() <= 1e-9 * t {
                r
            } else {
                t
            }
        })
        .collect())
}

/// The default ladder ratio `10^¼`.
pub fn quarter_decade() -> f64 {
    10f64.powf(0.25)
}

/// Linear-interpolation quantile of `values` (need not be sorted).
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    if lo == hi || v[lo] == v[hi] {
        return Some(v[lo]);
    }
    Some(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let t = geometric_ladder(10.0, quarter_decade(), 9).unwrap();
        let m: Vec<f64> = t.iter().map(|x| 1.0 / x).collect();
        let f = fit_loglog(&t, &m).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn ladder_endpoints_are_exact() {
        let t = geometric_ladder(10.0, quarter_decade(), 9).unwrap();
        assert_eq!(t[0], 10.0);
        assert_eq!(t[4], 100.0);
        assert_eq!(t[8], 1000.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert!(geometric_ladder(10.0, 1.0, 3).is_err());
    }

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(quantile(&[], 0.5), None);
    }
}
