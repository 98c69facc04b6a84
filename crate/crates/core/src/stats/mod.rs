//! Descriptive statistics, reference distributions and small tests shared by
//! the analysis modules.

mod simple;
mod two_sample;

use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal, StudentsT};

pub use simple::{simple_ols, SimpleFit};
pub use two_sample::{
    ks_two_sample, mann_whitney, two_sample_tests, welch_t_test, KsTest, MannWhitneyTest,
    PValueMethod, TTest, TwoSampleTests,
};

/// Arithmetic mean with one refinement pass; `None` when empty.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let first = values.iter().sum::<f64>() / n;
    let correction = values.iter().map(|v| v - first).sum::<f64>() / n;
    Some(first + correction)
}

/// Sample (n − 1) variance; `None` for fewer than two values.
pub fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Some(ss / (values.len() - 1) as f64)
}

pub fn sample_sd(values: &[f64]) -> Option<f64> {
    sample_variance(values).map(f64::sqrt)
}

/// Population central moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Option<Self> {
        let mean = mean(values)?;
        let n = values.len() as f64;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        Some(Self {
            n: values.len(),
            mean,
            m2: m2 / n,
            m3: m3 / n,
            m4: m4 / n,
        })
    }

    /// m₃ / m₂^{3/2}; `None` for zero spread.
    pub fn skewness(&self) -> Option<f64> {
        (self.m2 > 0.0).then(|| self.m3 / self.m2.powf(1.5))
    }

    /// m₄ / m₂² − 3; `None` for zero spread.
    pub fn excess_kurtosis(&self) -> Option<f64> {
        (self.m2 > 0.0).then(|| self.m4 / (self.m2 * self.m2) - 3.0)
    }
}

/// Median of a non-empty sample.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

pub fn normal_sf(x: f64) -> f64 {
    standard_normal().sf(x)
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Upper quantile t such that P(|T| > t) = alpha.
pub fn t_critical(alpha: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    dist.inverse_cdf(1.0 - alpha / 2.0)
}

/// Upper-tail probability of an F statistic.
pub fn f_sf(f: f64, df1: f64, df2: f64) -> f64 {
    if f.is_infinite() {
        return 0.0;
    }
    let dist = FisherSnedecor::new(df1, df2).expect("positive degrees of freedom");
    dist.sf(f)
}

/// Kolmogorov distance sup |F_n − F| between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((j as f64 / n - f).abs()).max((f - i as f64 / n).abs());
        i = j;
    }
    d
}

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a one-sample KS distance over `n` observations.
pub fn ks_one_sample_p(d: f64, n: usize) -> f64 {
    let en = (n as f64).sqrt();
    kolmogorov_sf((en + 0.12 + 0.11 / en) * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn moments_of_known_sample() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0, 10.0]).unwrap();
        assert!((m.mean - 4.0).abs() < 1e-15);
        assert!((m.m2 - 10.0).abs() < 1e-12);
        // m3 = (−27 −8 −1 + 0 + 216)/5
        assert!((m.m3 - 36.0).abs() < 1e-12);
        assert!((m.skewness().unwrap() - 36.0 / 10f64.powf(1.5)).abs() < 1e-12);
        assert!(Moments::of(&[2.0, 2.0]).unwrap().skewness().is_none());
        assert!((sample_variance(&[1.0, 2.0, 3.0, 4.0, 10.0]).unwrap() - 12.5).abs() < 1e-12);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn reference_distribution_values() {
        let p = normal_cdf(1.959963984540054);
        assert!((p - 0.975).abs() < 1e-10, "{p}");
        // t(10): P(|T| > 2.228138851986) = 0.05
        assert!((t_two_sided_p(2.228138851986, 10.0) - 0.05).abs() < 1e-9);
        assert!((t_critical(0.05, 10.0) - 2.228138851986).abs() < 1e-9);
        // F(2, 10) upper 5% point 4.102821015
        assert!((f_sf(4.102821015, 2.0, 10.0) - 0.05).abs() < 1e-8);
        // Q(1.3581) ≈ 0.05
        assert!((kolmogorov_sf(1.3580986) - 0.05).abs() < 1e-6);
    }

    #[test]
    fn ks_distance_of_exact_quantiles() {
        let n = 100;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&values, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn ks_distance_in_unit_interval(values in proptest::collection::vec(-5.0..5.0f64, 1..100)) {
            let d = ks_distance(&values, normal_cdf);
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
