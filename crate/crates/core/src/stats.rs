//! Least-squares line fits used for decay and scaling trends.

#[allow(unused_imports)]
use crate::fmath::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

impl LinearFit {
    /// Approximate 95% interval on the slope (±2 standard errors).
    pub fn slope_interval(&self) -> (f64, f64) {
        (self.slope - 2.0 * self.slope_stderr, self.slope + 2.0 * self.slope_stderr)
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = if n > 2 { (rss / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    Some(LinearFit { slope, intercept, slope_stderr, r_squared })
}

/// Slope of log(y) against log(x).
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let lx: alloc::vec::Vec<f64> = xs.iter().map(|x| libm::log(*x)).collect();
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|y| libm::log(*y)).collect();
    linear_fit(&lx, &ly)
}

/// Slope of log(y) against x.
pub fn loglinear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let ly: alloc::vec::Vec<f64> = ys.iter().map(|y| libm::log(*y)).collect();
    linear_fit(xs, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-12 && (f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_law() {
        let xs = [1e3, 1e4, 1e5];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        assert!((loglog_fit(&xs, &ys).unwrap().slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }
}
