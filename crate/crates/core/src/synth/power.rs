//! Editor article counts from a capped discrete power law.
//!
//! With stratified uniforms u_i = (i + U_i)/n, editor i gets
//! N_i = clamp(⌊m·u_i^{−1/α}⌋, 1, cap). The scale m is set so the total is
//! as close as possible to n·mean; when a target Gini is given, α is found
//! by bisection on the realized counts.

use super::{PowerConfig, SynthError};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerDraw {
    pub counts: Vec<usize>,
    pub exponent: f64,
    pub scale: f64,
    pub gini: f64,
}

/// Population Gini of non-negative values via the sorted-rank formula
/// G = Σ(2i − n − 1)x_(i) / (n Σx).
pub fn gini_sorted(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let weighted: f64 = v
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    weighted / (n * total)
}

fn counts(u: &[f64], exponent: f64, scale: f64, cap: usize) -> Vec<usize> {
    u.iter()
        .map(|&ui| {
            let x = scale * ui.powf(-1.0 / exponent);
            (x.floor().min(cap as f64) as usize).max(1)
        })
        .collect()
}

fn fit_scale(u: &[f64], exponent: f64, cap: usize, target_total: f64) -> f64 {
    let total = |s: f64| counts(u, exponent, s, cap).iter().sum::<usize>() as f64;
    let (mut lo, mut hi) = (1e-9, cap as f64 + 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < target_total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn gini_of(c: &[usize]) -> f64 {
    gini_sorted(&c.iter().map(|&x| x as f64).collect::<Vec<_>>())
}

/// Article counts for `u.len()` editors given stratified uniforms in (0, 1).
pub fn tune_powers(u: &[f64], config: &PowerConfig) -> Result<PowerDraw, SynthError> {
    if let Some(n) = config.fixed_articles {
        return Ok(PowerDraw {
            counts: vec![n; u.len()],
            exponent: f64::INFINITY,
            scale: n as f64,
            gini: 0.0,
        });
    }
    let cap = config.max_articles;
    let target_total = config.mean_articles * u.len() as f64;
    let draw = |exponent: f64| {
        let scale = fit_scale(u, exponent, cap, target_total);
        let c = counts(u, exponent, scale, cap);
        let gini = gini_of(&c);
        PowerDraw {
            counts: c,
            exponent,
            scale,
            gini,
        }
    };
    let Some(target) = config.target_gini else {
        return Ok(draw(config.exponent));
    };
    // Gini falls as the tail thins; search α on a log scale
    let (mut lo, mut hi) = (0.05f64.ln(), 50f64.ln());
    let (g_lo, g_hi) = (draw(lo.exp()).gini, draw(hi.exp()).gini);
    if !(g_hi..=g_lo).contains(&target) {
        return Err(SynthError::UnreachableGini {
            target,
            low: g_hi,
            high: g_lo,
        });
    }
    let mut best = draw(config.exponent);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let d = draw(mid.exp());
        if (d.gini - target).abs() < (best.gini - target).abs() {
            best = d.clone();
        }
        if d.gini > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::editor_metrics::gini_pairwise;

    fn stratified(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn sorted_formula_matches_pairwise() {
        let v: Vec<f64> = (0..60).map(|i| ((i * 37) % 17) as f64 + 0.5).collect();
        assert!((gini_sorted(&v) - gini_pairwise(&v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hits_target_gini_and_mean() {
        let u = stratified(3000);
        let cfg = PowerConfig {
            mean_articles: 10.0,
            max_articles: 160,
            ..PowerConfig::default()
        };
        let d = tune_powers(&u, &cfg).unwrap();
        assert!((d.gini - 0.58).abs() < 0.005, "gini {}", d.gini);
        let mean = d.counts.iter().sum::<usize>() as f64 / 3000.0;
        assert!((mean - 10.0).abs() < 0.2, "mean {mean}");
        assert!(d.counts.iter().all(|&c| (1..=160).contains(&c)));
    }

    #[test]
    fn unreachable_target() {
        let u = stratified(100);
        let cfg = PowerConfig {
            mean_articles: 2.0,
            max_articles: 3,
            target_gini: Some(0.95),
            ..PowerConfig::default()
        };
        assert!(matches!(tune_powers(&u, &cfg), Err(SynthError::UnreachableGini { .. })));
    }
}
