//! Lorenz curve and Gini index of editorial power.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InequalityError {
    #[error("inequality needs at least two values, got {0}")]
    TooFew(usize),
    #[error("values must be finite and non-negative")]
    Negative,
    #[error("Gini is undefined when every value is zero")]
    AllZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalitySummary {
    /// (population share, cumulative value share), from (0,0) to (1,1),
    /// population sorted ascending.
    pub lorenz: Vec<(f64, f64)>,
    /// Population Gini index, in [0, 1 − 1/n].
    pub gini: f64,
}

impl InequalitySummary {
    /// Cumulative share held by the bottom `fraction` of the population,
    /// interpolating linearly between Lorenz points.
    pub fn bottom_share(&self, fraction: f64) -> f64 {
        let fraction = fraction.clamp(0.0, 1.0);
        for w in self.lorenz.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if fraction <= x1 {
                return y0 + (y1 - y0) * (fraction - x0) / (x1 - x0);
            }
        }
        1.0
    }
}

/// Lorenz curve and Gini = Σᵢ (2i − n − 1)·x₍ᵢ₎ / (n²μ) over the ascending
/// order statistics, algebraically equal to Σᵢⱼ |xᵢ − xⱼ| / (2n²μ).
pub fn lorenz_gini(values: &[f64]) -> Result<InequalitySummary, InequalityError> {
    let n = values.len();
    if n < 2 {
        return Err(InequalityError::TooFew(n));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(InequalityError::Negative);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Err(InequalityError::AllZero);
    }
    let nf = n as f64;
    let mut weighted = 0.0;
    let mut cumulative = 0.0;
    let mut lorenz = Vec::with_capacity(n + 1);
    lorenz.push((0.0, 0.0));
    for (i, x) in sorted.iter().enumerate() {
        weighted += (2.0 * (i + 1) as f64 - nf - 1.0) * x;
        cumulative += x;
        lorenz.push(((i + 1) as f64 / nf, cumulative / total));
    }
    if let Some(last) = lorenz.last_mut() {
        *last = (1.0, 1.0);
    }
    let mean = total / nf;
    Ok(InequalitySummary {
        lorenz,
        gini: weighted / (nf * nf * mean),
    })
}

/// Direct O(n²) mean-absolute-difference Gini.
pub fn gini_pairwise(values: &[f64]) -> Option<f64> {
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    if values.is_empty() || total == 0.0 {
        return None;
    }
    let mut sum = 0.0;
    for a in values {
        for b in values {
            sum += (a - b).abs();
        }
    }
    Some(sum / (2.0 * n * n * (total / n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_equality() {
        let s = lorenz_gini(&[5.0; 8]).unwrap();
        assert_eq!(s.gini, 0.0);
        for (x, y) in &s.lorenz {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_case_against_pairwise() {
        let v = [1.0, 1.0, 1.0, 97.0];
        let s = lorenz_gini(&v).unwrap();
        // pairs (1,97) differ by 96: 6 ordered pairs → 576 / (2·16·25)
        assert!((s.gini - 576.0 / 800.0).abs() < 1e-15);
        assert!((s.gini - gini_pairwise(&v).unwrap()).abs() < 1e-15);
        assert!((s.bottom_share(0.75) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(lorenz_gini(&[1.0]), Err(InequalityError::TooFew(1)));
        assert_eq!(lorenz_gini(&[0.0, 0.0]), Err(InequalityError::AllZero));
        assert_eq!(lorenz_gini(&[1.0, -1.0]), Err(InequalityError::Negative));
    }

    proptest! {
        #[test]
        fn matches_pairwise_and_is_scale_invariant(
            v in proptest::collection::vec(1u32..1000, 2..200),
            c in 0.1..50.0f64,
        ) {
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let s = lorenz_gini(&v).unwrap();
            prop_assert!((s.gini - gini_pairwise(&v).unwrap()).abs() < 1e-12);
            prop_assert!((0.0..1.0).contains(&s.gini));
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            prop_assert!((lorenz_gini(&scaled).unwrap().gini - s.gini).abs() < 1e-12);
            // twice the area between the diagonal and the trapezoidal curve
            let area: f64 = s.lorenz.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum();
            prop_assert!((1.0 - 2.0 * area - s.gini).abs() < 1e-12);
            prop_assert_eq!(s.lorenz.first().copied(), Some((0.0, 0.0)));
            prop_assert_eq!(s.lorenz.last().copied(), Some((1.0, 1.0)));
            for w in s.lorenz.windows(2) {
                prop_assert!(w[1].1 >= w[0].1);
                // below the diagonal
                prop_assert!(w[1].1 <= w[1].0 + 1e-12);
            }
        }
    }
}
