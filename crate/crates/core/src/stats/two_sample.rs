//! Two-sample location and distribution tests: Welch t, Mann–Whitney U and
//! Kolmogorov–Smirnov, all two-sided.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{kolmogorov_sf, mean, normal_sf, sample_variance};

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Welch unequal-variance t-test. Requires at least two values per sample.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<TTest> {
    let (ma, mb) = (mean(a)?, mean(b)?);
    let (va, vb) = (sample_variance(a)?, sample_variance(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 == 0.0 {
        let same = ma == mb;
        return Some(TTest {
            statistic: if same { 0.0 } else { f64::INFINITY.copysign(ma - mb) },
            df: na + nb - 2.0,
            p_value: if same { 1.0 } else { 0.0 },
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    Some(TTest {
        statistic: t,
        df,
        p_value: (2.0 * dist.sf(t.abs())).min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MannWhitneyTest {
    /// U of the first sample, in [0, n₁n₂].
    pub u: f64,
    pub p_value: f64,
    pub method: PValueMethod,
}

/// Samples at or below this size per side use the exact null distribution
/// when there are no ties.
pub const MANN_WHITNEY_EXACT_MAX: usize = 20;

/// Midranks of the pooled sample, plus Σ(t³ − t) over tie groups.
fn pooled_ranks(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .chain(b)
        .copied()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for item in &pooled[i..j] {
            ranks[item.1] = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Number of arrangements giving each U value, for samples of size m and n.
fn mann_whitney_counts(m: usize, n: usize) -> Vec<f64> {
    // f[i][j][u] via rolling over i: f(i, j, u) = f(i−1, j, u−j) + f(i, j−1, u)
    let max_u = m * n;
    let mut prev: Vec<Vec<f64>> = (0..=n)
        .map(|_| {
            let mut v = vec![0.0; max_u + 1];
            v[0] = 1.0;
            v
        })
        .collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n + 1];
        cur[0][0] = 1.0;
        for j in 1..=n {
            for u in 0..=i * j {
                let mut c = cur[j - 1][u];
                if u >= j {
                    c += prev[j][u - j];
                }
                cur[j][u] = c;
            }
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

pub fn mann_whitney(a: &[f64], b: &[f64]) -> Option<MannWhitneyTest> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (n1, n2) = (a.len(), b.len());
    let (ranks, tie_term) = pooled_ranks(a, b);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let (n1f, n2f) = (n1 as f64, n2 as f64);

    if n1 <= MANN_WHITNEY_EXACT_MAX && n2 <= MANN_WHITNEY_EXACT_MAX && tie_term == 0.0 {
        let counts = mann_whitney_counts(n1, n2);
        let total: f64 = counts.iter().sum();
        let u_int = u.round() as usize;
        let lower: f64 = counts[..=u_int].iter().sum::<f64>() / total;
        let upper: f64 = counts[u_int..].iter().sum::<f64>() / total;
        return Some(MannWhitneyTest {
            u,
            p_value: (2.0 * lower.min(upper)).min(1.0),
            method: PValueMethod::Exact,
        });
    }

    let n = n1f + n2f;
    let mu = n1f * n2f / 2.0;
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
        (2.0 * normal_sf(z)).min(1.0)
    };
    Some(MannWhitneyTest {
        u,
        p_value,
        method: PValueMethod::Asymptotic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
    pub method: PValueMethod,
}

/// Largest n·m for which the exact lattice-path p-value is computed.
pub const KS_EXACT_MAX_CELLS: usize = 4_000_000;

/// sup |F_a − F_b| expressed as the integer max |i·m − j·n| over the merged
/// order statistics, so the exact null distribution can be evaluated on the
/// same lattice.
fn ks_lattice_statistic(a: &[f64], b: &[f64]) -> u64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as i64, ys.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best: i64 = 0;
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] == x {
            i += 1;
        }
        while j < ys.len() && ys[j] == x {
            j += 1;
        }
        best = best.max((i as i64 * m - j as i64 * n).abs());
    }
    best as u64
}

/// P(D ≥ c/(nm)) under the null, by the probability that a uniformly random
/// monotone lattice path from (0,0) to (n,m) stays strictly inside the band
/// |i·m − j·n| < c.
fn ks_exact_sf(n: usize, m: usize, c: u64) -> f64 {
    if c == 0 {
        return 1.0;
    }
    let inside = |i: usize, j: usize| (i as i64 * m as i64 - j as i64 * n as i64).unsigned_abs() < c;
    let mut row = vec![0.0f64; m + 1];
    row[0] = 1.0;
    for j in 1..=m {
        row[j] = if inside(0, j) { row[j - 1] } else { 0.0 };
    }
    for i in 1..=n {
        row[0] = if inside(i, 0) { row[0] } else { 0.0 };
        for j in 1..=m {
            row[j] = if inside(i, j) {
                let total = (i + j) as f64;
                (i as f64 / total) * row[j] + (j as f64 / total) * row[j - 1]
            } else {
                0.0
            };
        }
    }
    (1.0 - row[m]).clamp(0.0, 1.0)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Option<KsTest> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let (n, m) = (a.len(), b.len());
    let c = ks_lattice_statistic(a, b);
    let statistic = c as f64 / (n as f64 * m as f64);
    if n * m <= KS_EXACT_MAX_CELLS {
        return Some(KsTest {
            statistic,
            p_value: ks_exact_sf(n, m, c),
            method: PValueMethod::Exact,
        });
    }
    let en = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    Some(KsTest {
        statistic,
        p_value: kolmogorov_sf((en + 0.12 + 0.11 / en) * statistic),
        method: PValueMethod::Asymptotic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSampleTests {
    pub n_first: usize,
    pub n_second: usize,
    pub welch: Option<TTest>,
    pub mann_whitney: MannWhitneyTest,
    pub ks: KsTest,
}

/// Runs all three tests; `None` if either sample has fewer than two values.
pub fn two_sample_tests(a: &[f64], b: &[f64]) -> Option<TwoSampleTests> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    Some(TwoSampleTests {
        n_first: a.len(),
        n_second: b.len(),
        welch: welch_t_test(a, b),
        mann_whitney: mann_whitney(a, b)?,
        ks: ks_two_sample(a, b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_samples_are_maximal() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let t = welch_t_test(&a, &a).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let mw = mann_whitney(&a, &a).unwrap();
        assert_eq!(mw.u, 12.5);
        assert!((mw.p_value - 1.0).abs() < 1e-12);
        let ks = ks_two_sample(&a, &a).unwrap();
        assert_eq!(ks.statistic, 0.0);
        assert_eq!(ks.p_value, 1.0);
    }

    #[test]
    fn welch_matches_hand_computation() {
        // a: mean 2, var 1; b: mean 5, var 2.5
        let a = [1.0, 2.0, 3.0];
        let b = [3.0, 4.0, 5.0, 6.0, 7.0];
        let t = welch_t_test(&a, &b).unwrap();
        let se2: f64 = 1.0 / 3.0 + 2.5 / 5.0;
        assert!((t.statistic - (-3.0 / se2.sqrt())).abs() < 1e-12);
        let df = se2 * se2 / ((1.0f64 / 3.0).powi(2) / 2.0 + 0.5f64.powi(2) / 4.0);
        assert!((t.df - df).abs() < 1e-12);
    }

    #[test]
    fn exact_mann_whitney_small_case() {
        // Complete separation with n1 = n2 = 3: P(U = 0) = 1/20, two-sided 0.1
        let mw = mann_whitney(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(mw.u, 0.0);
        assert_eq!(mw.method, PValueMethod::Exact);
        assert!((mw.p_value - 0.1).abs() < 1e-12);
    }

    #[test]
    fn exact_counts_sum_to_binomial() {
        let counts = mann_whitney_counts(4, 6);
        assert_eq!(counts.iter().sum::<f64>(), 210.0);
        // symmetric null distribution
        for u in 0..=24 {
            assert_eq!(counts[u], counts[24 - u]);
        }
    }

    #[test]
    fn exact_ks_small_case() {
        // n = m = 2, complete separation: D = 1, only 2 of 6 paths reach it
        let ks = ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(ks.statistic, 1.0);
        assert!((ks.p_value - 2.0 / 6.0).abs() < 1e-12);
    }

    /// Brute-force oracle: enumerate all splits of the pooled ranks.
    fn ks_enumeration_sf(n: usize, m: usize, c: u64) -> f64 {
        let total = n + m;
        let mut hits = 0u64;
        let mut all = 0u64;
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            all += 1;
            let (mut i, mut j, mut best) = (0i64, 0i64, 0i64);
            for k in 0..total {
                if mask & (1 << k) != 0 {
                    i += 1;
                } else {
                    j += 1;
                }
                best = best.max((i * m as i64 - j * n as i64).abs());
            }
            if best as u64 >= c {
                hits += 1;
            }
        }
        hits as f64 / all as f64
    }

    #[test]
    fn exact_ks_matches_enumeration() {
        for (n, m) in [(3, 4), (5, 5), (4, 7), (6, 3)] {
            for c in 1..=(n * m) as u64 {
                let exact = ks_exact_sf(n, m, c);
                let brute = ks_enumeration_sf(n, m, c);
                assert!((exact - brute).abs() < 1e-12, "n={n} m={m} c={c}");
            }
        }
    }

    proptest! {
        #[test]
        fn statistic_ranges(
            a in proptest::collection::vec(-3.0..3.0f64, 1..40),
            b in proptest::collection::vec(-3.0..3.0f64, 1..40),
        ) {
            let mw = mann_whitney(&a, &b).unwrap();
            prop_assert!(mw.u >= 0.0 && mw.u <= (a.len() * b.len()) as f64);
            prop_assert!((0.0..=1.0).contains(&mw.p_value));
            let ks = ks_two_sample(&a, &b).unwrap();
            prop_assert!((0.0..=1.0).contains(&ks.statistic));
            prop_assert!((0.0..=1.0).contains(&ks.p_value));
        }

        #[test]
        fn mann_whitney_u_values_are_complementary(
            a in proptest::collection::vec(-3.0..3.0f64, 1..30),
            b in proptest::collection::vec(-3.0..3.0f64, 1..30),
        ) {
            let ab = mann_whitney(&a, &b).unwrap();
            let ba = mann_whitney(&b, &a).unwrap();
            prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        }
    }
}
