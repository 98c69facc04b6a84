//! The fixed-effects estimator.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{Factor, ModelSpec, PanelData};
use crate::linalg::{least_squares, quadratic_form, spd_inverse, Matrix};
use crate::stats::{f_sf, mean, sample_sd, t_critical, t_two_sided_p};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("variable `{0}` is not in the data")]
    MissingVariable(String),
    #[error("dependent variable `{0}` also appears among the regressors")]
    DependentAmongRegressors(String),
    #[error("interaction `{term}` uses `{factor}`, which is neither a main-effect term nor a dummy")]
    UndeclaredFactor { term: String, factor: String },
    #[error("variable `{variable}` is not finite at observation {row}")]
    NonFinite { variable: String, row: usize },
    #[error("model needs at least two clusters, found {0}")]
    TooFewClusters(usize),
    #[error("{n} observations cannot identify {k} parameters")]
    TooFewObservations { n: usize, k: usize },
    #[error("model has no regressors")]
    NoRegressors,
}

/// Role of a coefficient, used to evaluate predictions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CoefficientKind {
    Constant,
    /// Product of the listed factor labels.
    Term { factors: Vec<String> },
    Dummy { variable: String, level: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub kind: CoefficientKind,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// β·sd(x)/sd(y) on the estimation sample; `None` for the constant or a
    /// constant regressor.
    pub standardized: Option<f64>,
    /// Sample mean of the regressor column (1 for the constant).
    pub column_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: String,
    pub dependent: String,
    pub sample: String,
    /// Kept coefficients, regressors in model order, constant last.
    pub coefficients: Vec<Coefficient>,
    /// Columns removed as collinear (with the fixed effects or each other).
    pub dropped: Vec<String>,
    /// Cluster-robust covariance in `coefficients` order.
    pub covariance: Vec<Vec<f64>>,
    /// Within residuals ε, in sample order.
    pub residuals: Vec<f64>,
    pub n_obs: usize,
    pub n_clusters: usize,
    pub df_model: usize,
    /// G − 1, used for t and F reference distributions.
    pub df_resid: usize,
    pub r2_within: f64,
    pub adj_r2_within: f64,
    pub f_stat: Option<f64>,
    pub f_p_value: Option<f64>,
    pub rss: f64,
    /// Estimation-sample mean of each factor label.
    pub factor_means: BTreeMap<String, f64>,
    /// Estimation-sample (min, max) of each factor label.
    pub factor_ranges: BTreeMap<String, (f64, f64)>,
    pub mean_dependent: f64,
    pub sd_dependent: f64,
    /// Raw-scale mean of the dependent variable before transformation.
    pub mean_dependent_raw: f64,
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn constant(&self) -> &Coefficient {
        self.coefficients
            .iter()
            .find(|c| c.kind == CoefficientKind::Constant)
            .expect("constant is never dropped")
    }
}

fn factor_values(data: &PanelData, factor: &Factor) -> Result<Vec<f64>, FitError> {
    let raw = data
        .numeric(&factor.variable)
        .ok_or_else(|| FitError::MissingVariable(factor.variable.clone()))?;
    raw.iter()
        .enumerate()
        .map(|(row, &x)| {
            let v = factor.transform.apply(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FitError::NonFinite {
                    variable: factor.label.clone(),
                    row,
                })
            }
        })
        .collect()
}

fn validate(spec: &ModelSpec, data: &PanelData) -> Result<(), FitError> {
    if spec.terms.is_empty() && spec.dummies.is_empty() {
        return Err(FitError::NoRegressors);
    }
    let dep = &spec.dependent.variable;
    if spec
        .terms
        .iter()
        .flat_map(|t| &t.factors)
        .any(|f| &f.variable == dep)
        || spec.dummies.contains(dep)
    {
        return Err(FitError::DependentAmongRegressors(dep.clone()));
    }
    let mains: BTreeSet<&str> = spec
        .terms
        .iter()
        .filter(|t| t.factors.len() == 1)
        .map(|t| t.factors[0].label.as_str())
        .collect();
    for term in spec.terms.iter().filter(|t| t.factors.len() > 1) {
        for f in &term.factors {
            if !mains.contains(f.label.as_str()) && !spec.dummies.contains(&f.variable) {
                return Err(FitError::UndeclaredFactor {
                    term: term.name(),
                    factor: f.label.clone(),
                });
            }
        }
    }
    for d in &spec.dummies {
        if data.categorical(d).is_none() {
            return Err(FitError::MissingVariable(d.clone()));
        }
    }
    Ok(())
}

/// Subtracts each cluster mean and adds back the grand mean.
fn within(values: &[f64], cluster: &[usize], n_clusters: usize) -> Vec<f64> {
    let mut sums = vec![0.0; n_clusters];
    let mut counts = vec![0usize; n_clusters];
    for (&v, &g) in values.iter().zip(cluster) {
        sums[g] += v;
        counts[g] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    // second pass removes the rounding left by the first
    let mut corr = vec![0.0; n_clusters];
    for (&v, &g) in values.iter().zip(cluster) {
        corr[g] += v - means[g];
    }
    let means: Vec<f64> = means
        .iter()
        .zip(corr.iter().zip(&counts))
        .map(|(m, (c, &n))| m + c / n as f64)
        .collect();
    let grand = mean(values).unwrap_or(0.0);
    values
        .iter()
        .zip(cluster)
        .map(|(&v, &g)| v - means[g] + grand)
        .collect()
}

struct Column {
    name: String,
    kind: CoefficientKind,
    raw: Vec<f64>,
}

pub fn fit_fixed_effects(data: &PanelData, spec: &ModelSpec) -> Result<FitResult, FitError> {
    validate(spec, data)?;
    let n = data.len();

    // dense cluster index in order of first appearance
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let cluster: Vec<usize> = data
        .clusters()
        .iter()
        .map(|&c| {
            let next = dense.len();
            *dense.entry(c).or_insert(next)
        })
        .collect();
    let g = dense.len();
    if g < 2 {
        return Err(FitError::TooFewClusters(g));
    }

    let y = factor_values(data, &spec.dependent)?;
    let y_raw = data
        .numeric(&spec.dependent.variable)
        .ok_or_else(|| FitError::MissingVariable(spec.dependent.variable.clone()))?;

    let mut factor_cache: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut columns: Vec<Column> = Vec::new();
    for term in &spec.terms {
        let mut product = vec![1.0; n];
        for f in &term.factors {
            if !factor_cache.contains_key(&f.label) {
                factor_cache.insert(f.label.clone(), factor_values(data, f)?);
            }
            for (p, v) in product.iter_mut().zip(&factor_cache[&f.label]) {
                *p *= v;
            }
        }
        columns.push(Column {
            name: term.name(),
            kind: CoefficientKind::Term {
                factors: term.factors.iter().map(|f| f.label.clone()).collect(),
            },
            raw: product,
        });
    }
    for d in &spec.dummies {
        let values = data.categorical(d).expect("validated");
        let levels: BTreeSet<i64> = values.iter().copied().collect();
        for &level in levels.iter().skip(1) {
            columns.push(Column {
                name: format!("{d}={level}"),
                kind: CoefficientKind::Dummy {
                    variable: d.clone(),
                    level,
                },
                raw: values.iter().map(|&v| f64::from(u8::from(v == level))).collect(),
            });
        }
    }

    let p = columns.len() + 1;
    if n <= p {
        return Err(FitError::TooFewObservations { n, k: p });
    }

    let y_w = within(&y, &cluster, g);
    let mut design = vec![vec![1.0; n]];
    design.extend(columns.iter().map(|c| within(&c.raw, &cluster, g)));
    let x = Matrix::from_columns(n, design);
    let ls = least_squares(&x, &y_w, spec.tolerance);

    let mut diagnostics = Vec::new();
    let dropped: Vec<String> = ls
        .dropped
        .iter()
        .map(|&j| {
            let name = columns[j - 1].name.clone();
            diagnostics.push(format!("dropped `{name}`: collinear with the fixed effects or other regressors"));
            name
        })
        .collect();

    let k = ls.kept.len();
    let mut beta_full = vec![0.0; p];
    for (i, &j) in ls.kept.iter().enumerate() {
        beta_full[j] = ls.coefficients[i];
    }
    let fitted = x.mul_vec(&beta_full);
    let residuals: Vec<f64> = y_w.iter().zip(&fitted).map(|(a, b)| a - b).collect();

    // cluster-robust sandwich
    let bread = ls.xtx_inverse();
    let mut scores = vec![vec![0.0; k]; g];
    for (c, &j) in ls.kept.iter().enumerate() {
        let col = x.column(j);
        for i in 0..n {
            scores[cluster[i]][c] += col[i] * residuals[i];
        }
    }
    let mut meat = vec![vec![0.0; k]; k];
    for s in &scores {
        for a in 0..k {
            for b in a..k {
                meat[a][b] += s[a] * s[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            meat[a][b] = meat[b][a];
        }
    }
    let (nf, gf, kf) = (n as f64, g as f64, k as f64);
    let correction = gf / (gf - 1.0) * (nf - 1.0) / (nf - kf);
    let bm = matmul(&bread, &meat);
    let mut cov = matmul(&bm, &bread);
    for row in cov.iter_mut() {
        for v in row.iter_mut() {
            *v *= correction;
        }
    }
    symmetrize(&mut cov);

    let df_resid = g - 1;
    let t_crit = t_critical(0.05, df_resid as f64);
    let sd_y = sample_sd(&y).unwrap_or(0.0);

    // reorder: regressors in spec order, constant last
    let order: Vec<usize> = (1..k).chain(std::iter::once(0)).collect();
    let coefficients: Vec<Coefficient> = order
        .iter()
        .map(|&i| {
            let j = ls.kept[i];
            let estimate = ls.coefficients[i];
            let se = cov[i][i].max(0.0).sqrt();
            let t = estimate / se;
            let (name, kind, column_mean, standardized) = if j == 0 {
                ("_cons".to_string(), CoefficientKind::Constant, 1.0, None)
            } else {
                let c = &columns[j - 1];
                let sd_x = sample_sd(&c.raw).unwrap_or(0.0);
                let standardized =
                    (sd_x > 0.0 && sd_y > 0.0).then(|| estimate * sd_x / sd_y);
                (c.name.clone(), c.kind.clone(), mean(&c.raw).unwrap_or(0.0), standardized)
            };
            Coefficient {
                name,
                kind,
                estimate,
                std_error: se,
                t,
                p_value: t_two_sided_p(t, df_resid as f64),
                ci_low: estimate - t_crit * se,
                ci_high: estimate + t_crit * se,
                standardized,
                column_mean,
            }
        })
        .collect();
    let covariance: Vec<Vec<f64>> = order
        .iter()
        .map(|&a| order.iter().map(|&b| cov[a][b]).collect())
        .collect();

    let y_mean = mean(&y).unwrap_or(0.0);
    let tss: f64 = y_w.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let adj = 1.0 - (1.0 - r2) * (nf - 1.0) / (nf - kf);

    let q = k - 1;
    let (f_stat, f_p_value) = if q == 0 {
        (None, None)
    } else {
        let v: Vec<Vec<f64>> = (1..k).map(|a| (1..k).map(|b| cov[a][b]).collect()).collect();
        let b: Vec<f64> = (1..k).map(|a| ls.coefficients[a]).collect();
        match spd_inverse(&v) {
            Some(inv) => {
                let f = quadratic_form(&inv, &b) / q as f64;
                (Some(f), Some(f_sf(f, q as f64, df_resid as f64)))
            }
            None => {
                diagnostics.push("F statistic unavailable: robust covariance of the slopes is singular".into());
                (None, None)
            }
        }
    };

    let mut factor_means = BTreeMap::new();
    let mut factor_ranges = BTreeMap::new();
    for (label, values) in &factor_cache {
        factor_means.insert(label.clone(), mean(values).unwrap_or(0.0));
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        factor_ranges.insert(label.clone(), (lo, hi));
    }

    Ok(FitResult {
        model: spec.name.clone(),
        dependent: spec.dependent.label.clone(),
        sample: spec.sample.clone(),
        coefficients,
        dropped,
        covariance,
        residuals,
        n_obs: n,
        n_clusters: g,
        df_model: q,
        df_resid,
        r2_within: r2,
        adj_r2_within: adj,
        f_stat,
        f_p_value,
        rss,
        factor_means,
        factor_ranges,
        mean_dependent: y_mean,
        sd_dependent: sd_y,
        mean_dependent_raw: mean(y_raw).unwrap_or(0.0),
        diagnostics,
    })
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| (0..k).map(|l| row[l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

fn symmetrize(m: &mut [Vec<f64>]) {
    for i in 0..m.len() {
        for j in 0..i {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Factor, ModelSpec, Term, Transform};
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Panel with `g` clusters of `m` rows, regressors x1..xp.
    fn random_panel(seed: u64, g: usize, m: usize, p: usize) -> (PanelData, Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g * m;
        let clusters: Vec<usize> = (0..n).map(|i| i / m).collect();
        let alpha: Vec<f64> = (0..g).map(|_| 3.0 * uniform(&mut rng) - 1.5).collect();
        let xs: Vec<Vec<f64>> = (0..p)
            .map(|j| (0..n).map(|i| uniform(&mut rng) * (j + 1) as f64 + alpha[i / m] * 0.5).collect())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let signal: f64 = xs.iter().enumerate().map(|(j, x)| (j as f64 - 1.0) * x[i]).sum();
                signal + alpha[i / m] + (uniform(&mut rng) - 0.5) * (1.0 + clusters[i] as f64 * 0.1)
            })
            .collect();
        let mut data = PanelData::new(clusters);
        for (j, x) in xs.iter().enumerate() {
            data.add_numeric(&format!("x{j}"), x.clone()).unwrap();
        }
        data.add_numeric("y", y.clone()).unwrap();
        (data, xs, y)
    }

    fn spec(p: usize) -> ModelSpec {
        let terms = (0..p).map(|j| Term::main(Factor::identity(&format!("x{j}")))).collect();
        ModelSpec::new("test", Factor::identity("y"), terms, &[])
    }

    /// Least-squares-dummy-variable regression: one indicator per cluster.
    fn lsdv(xs: &[Vec<f64>], y: &[f64], g: usize, m: usize) -> DVector<f64> {
        let n = y.len();
        let p = xs.len();
        let design = DMatrix::from_fn(n, p + g, |i, j| if j < p { xs[j][i] } else if i / m == j - p { 1.0 } else { 0.0 });
        let xtx = design.transpose() * &design;
        let xty = design.transpose() * DVector::from_vec(y.to_vec());
        xtx.cholesky().unwrap().solve(&xty)
    }

    #[test]
    fn matches_dummy_variable_regression() {
        for seed in 0..5 {
            let (data, xs, y) = random_panel(seed, 50, 10, 5);
            let fit = fit_fixed_effects(&data, &spec(5)).unwrap();
            let oracle = lsdv(&xs, &y, 50, 10);
            for j in 0..5 {
                let b = fit.coefficient(&format!("x{j}")).unwrap().estimate;
                assert!((b - oracle[j]).abs() <= 1e-8 * oracle[j].abs().max(1e-3), "seed {seed} x{j}");
            }
            // constant equals the average of the dummy intercepts, weighted by cluster size
            let avg: f64 = (0..50).map(|c| oracle[5 + c]).sum::<f64>() / 50.0;
            assert!((fit.constant().estimate - avg).abs() < 1e-8);
        }
    }

    #[test]
    fn sandwich_matches_direct_formula() {
        let (data, xs, y) = random_panel(11, 20, 8, 3);
        let fit = fit_fixed_effects(&data, &spec(3)).unwrap();
        // direct: demean, add intercept, V = c (X'X)^-1 Σ X_g'u_g u_g'X_g (X'X)^-1
        let (g, m, n) = (20, 8, 160);
        let dm = |v: &[f64]| -> Vec<f64> {
            let grand = v.iter().sum::<f64>() / n as f64;
            (0..n).map(|i| {
                let c = i / m;
                let cm = v[c * m..(c + 1) * m].iter().sum::<f64>() / m as f64;
                v[i] - cm + grand
            }).collect()
        };
        let cols: Vec<Vec<f64>> = xs.iter().map(|x| dm(x)).collect();
        let x = DMatrix::from_fn(n, 4, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
        let yv = DVector::from_vec(dm(&y));
        let xtx_inv = (x.transpose() * &x).try_inverse().unwrap();
        let beta = &xtx_inv * x.transpose() * &yv;
        let u = &yv - &x * &beta;
        let mut meat = DMatrix::zeros(4, 4);
        for c in 0..g {
            let xg = x.rows(c * m, m);
            let s = xg.transpose() * u.rows(c * m, m);
            meat += &s * s.transpose();
        }
        let corr = (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / (n as f64 - 4.0));
        let v = corr * &xtx_inv * meat * &xtx_inv;
        for j in 0..3 {
            let se = fit.coefficient(&format!("x{j}")).unwrap().std_error;
            let oracle = v[(j + 1, j + 1)].sqrt();
            assert!((se - oracle).abs() <= 1e-8 * oracle, "x{j}");
        }
        let cons_se = fit.constant().std_error;
        assert!((cons_se - v[(0, 0)].sqrt()).abs() <= 1e-8 * v[(0, 0)].sqrt());
    }

    #[test]
    fn recovers_slope_with_editor_intercepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = 200;
        let m = 20;
        let n = g * m;
        let alpha: Vec<f64> = (0..g).map(|_| 5.0 * uniform(&mut rng)).collect();
        let x: Vec<f64> = (0..n).map(|i| uniform(&mut rng) + alpha[i / m]).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.0 * x[i] + alpha[i / m] + uniform(&mut rng) - 0.5)
            .collect();
        let mut data = PanelData::new((0..n).map(|i| i / m).collect());
        data.add_numeric("x", x).unwrap();
        data.add_numeric("y", y).unwrap();
        let fit = fit_fixed_effects(&data, &ModelSpec::new("t", Factor::identity("y"), vec![Term::main(Factor::identity("x"))], &[])).unwrap();
        let b = fit.coefficient("x").unwrap();
        assert!((b.estimate - 2.0).abs() < 3.0 * b.std_error);
    }

    #[test]
    fn cluster_constant_regressor_is_dropped() {
        let (mut data, _, _) = random_panel(3, 10, 5, 1);
        data.add_numeric("level", (0..50).map(|i| (i / 5) as f64).collect()).unwrap();
        let mut s = spec(1);
        s.terms.push(Term::main(Factor::identity("level")));
        let fit = fit_fixed_effects(&data, &s).unwrap();
        assert_eq!(fit.dropped, vec!["level".to_string()]);
        assert_eq!(fit.df_model, 1);
        assert!(!fit.diagnostics.is_empty());
    }

    #[test]
    fn errors() {
        let (mut data, _, _) = random_panel(3, 10, 5, 1);
        let mut s = spec(1);
        s.terms.push(Term::main(Factor::identity("y")));
        assert!(matches!(fit_fixed_effects(&data, &s), Err(FitError::DependentAmongRegressors(_))));

        let mut s = spec(1);
        s.terms.push(Term::interaction(vec![Factor::identity("x0"), Factor::identity("w")]));
        data.add_numeric("w", vec![1.0; 50]).unwrap();
        assert!(matches!(fit_fixed_effects(&data, &s), Err(FitError::UndeclaredFactor { .. })));

        let mut s = spec(1);
        s.terms[0] = Term::main(Factor::new("x0", Transform::LnShift(-10.0)));
        assert!(matches!(fit_fixed_effects(&data, &s), Err(FitError::NonFinite { .. })));

        let one = PanelData::new(vec![0; 5]);
        let mut one = one;
        one.add_numeric("x0", vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        one.add_numeric("y", vec![1.0, 2.0, 3.0, 4.0, 6.0]).unwrap();
        assert!(matches!(fit_fixed_effects(&one, &spec(1)), Err(FitError::TooFewClusters(1))));
    }

    #[test]
    fn dummies_omit_smallest_level() {
        let (mut data, _, _) = random_panel(5, 10, 6, 1);
        data.add_categorical("year", (0..60).map(|i| 2010 + (i % 3) as i64).collect()).unwrap();
        let mut s = spec(1);
        s.dummies.push("year".into());
        let fit = fit_fixed_effects(&data, &s).unwrap();
        let names: Vec<_> = fit.coefficients.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["x0", "year=2011", "year=2012", "_cons"]);
    }

    #[test]
    fn standardized_coefficients_are_scale_free() {
        let (data, xs, y) = random_panel(9, 30, 10, 2);
        let base = fit_fixed_effects(&data, &spec(2)).unwrap();
        let mut scaled = PanelData::new(data.clusters().to_vec());
        scaled.add_numeric("x0", xs[0].iter().map(|v| v * 10.0).collect()).unwrap();
        scaled.add_numeric("x1", xs[1].clone()).unwrap();
        scaled.add_numeric("y", y).unwrap();
        let fit = fit_fixed_effects(&scaled, &spec(2)).unwrap();
        let (a, b) = (base.coefficient("x0").unwrap(), fit.coefficient("x0").unwrap());
        assert!((a.estimate / 10.0 - b.estimate).abs() < 1e-10);
        assert!((a.standardized.unwrap() - b.standardized.unwrap()).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn structural_invariants(seed in 0u64..1000, perm_seed in 0u64..1000) {
            let (data, _, _) = random_panel(seed, 12, 7, 3);
            let fit = fit_fixed_effects(&data, &spec(3)).unwrap();
            // residuals sum to zero within each cluster
            let scale = fit.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
            for c in 0..12 {
                let s: f64 = fit.residuals[c * 7..(c + 1) * 7].iter().sum();
                prop_assert!(s.abs() <= 1e-8 * scale.max(1.0));
            }
            // covariance is symmetric PSD
            let k = fit.covariance.len();
            for i in 0..k {
                for j in 0..k {
                    prop_assert_eq!(fit.covariance[i][j], fit.covariance[j][i]);
                }
            }
            let m = DMatrix::from_fn(k, k, |i, j| fit.covariance[i][j]);
            let min_eig = m.symmetric_eigenvalues().min();
            let max_eig = m.symmetric_eigenvalues().max();
            prop_assert!(min_eig >= -1e-10 * max_eig);

            // permuting observation order changes nothing
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            let n = data.len();
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                order.swap(i, j);
            }
            let mut permuted = PanelData::new(order.iter().map(|&i| data.clusters()[i]).collect());
            for name in ["x0", "x1", "x2", "y"] {
                let col = data.numeric(name).unwrap();
                permuted.add_numeric(name, order.iter().map(|&i| col[i]).collect()).unwrap();
            }
            let fit2 = fit_fixed_effects(&permuted, &spec(3)).unwrap();
            for (a, b) in fit.coefficients.iter().zip(&fit2.coefficients) {
                prop_assert!((a.estimate - b.estimate).abs() <= 1e-12 * (1.0 + a.estimate.abs()) * 10.0);
                prop_assert!((a.std_error - b.std_error).abs() <= 1e-12 * (1.0 + a.std_error.abs()) * 10.0);
            }
        }
    }
}
