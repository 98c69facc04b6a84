//! Single-regressor ordinary least squares with classical inference.

use serde::Serialize;

use super::{mean, t_two_sided_p};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimpleFit {
    pub n: usize,
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub t: f64,
    /// Two-sided, t distribution with n − 2 degrees of freedom.
    pub p_value: f64,
}

/// Fits y = a + b·x. `None` with fewer than three points or constant x.
pub fn simple_ols(x: &[f64], y: &[f64]) -> Option<SimpleFit> {
    assert_eq!(x.len(), y.len(), "x and y lengths differ");
    let n = x.len();
    if n < 3 {
        return None;
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    let df = (n - 2) as f64;
    let slope_se = (rss / df / sxx).sqrt();
    let scale = y.iter().map(|v| (v - my).abs()).fold(0.0, f64::max);
    let (t, p_value) = if slope_se <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        // exact fit
        let t = if slope == 0.0 { 0.0 } else { f64::INFINITY.copysign(slope) };
        (t, if slope == 0.0 { 1.0 } else { 0.0 })
    } else {
        let t = slope / slope_se;
        (t, t_two_sided_p(t, df))
    };
    Some(SimpleFit {
        n,
        intercept,
        slope,
        slope_se,
        t,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let fit = simple_ols(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept - 1.0).abs() < 1e-14);
        assert_eq!(fit.p_value, 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(simple_ols(&[1.0, 2.0], &[1.0, 2.0]).is_none());
        assert!(simple_ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn textbook_standard_error() {
        let x = [1.0, 2.0, 3.0];
        let y = [1.0, 1.0, 3.0];
        let fit = simple_ols(&x, &y).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-14);
        // residuals 1/3, −2/3, 1/3 → rss 2/3, df 1, sxx 2
        assert!((fit.intercept + 1.0 / 3.0).abs() < 1e-14);
        let se = ((2.0 / 3.0) / 1.0 / 2.0f64).sqrt();
        assert!((fit.slope_se - se).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn t_statistic_invariant_to_rescaling_x(
            pts in proptest::collection::vec((0.0..10.0f64, -5.0..5.0f64), 4..30),
            a in 0.01..100.0f64,
        ) {
            let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let scaled: Vec<f64> = x.iter().map(|v| v * a).collect();
            if let (Some(f1), Some(f2)) = (simple_ols(&x, &y), simple_ols(&scaled, &y)) {
                prop_assert!((f1.t - f2.t).abs() < 1e-6 * (1.0 + f1.t.abs()));
                prop_assert!((f1.p_value - f2.p_value).abs() < 1e-8);
            }
        }
    }
}
