//! Linear predictions and slopes over a moderator grid, with delta-method
//! confidence intervals from the cluster-robust covariance.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{CoefficientKind, FitResult};
use crate::linalg::quadratic_form;
use crate::stats::{t_critical, t_two_sided_p};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarginsError {
    #[error("factor `{0}` does not appear in the fitted model")]
    UnknownFactor(String),
    #[error("moderator `{0}` enters no kept coefficient")]
    ModeratorAbsent(String),
    #[error("moderator grid is empty")]
    EmptyGrid,
}

/// Where to evaluate the model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginsRequest {
    /// Factor label varied along the grid, e.g. `ln_tau`.
    pub moderator: String,
    /// Moderator values on the transformed scale.
    pub grid: Vec<f64>,
    /// Binary factor whose branches 0 and 1 are compared, e.g. `R`.
    pub branch: Option<String>,
    /// Factors pinned to a value instead of their sample mean.
    pub fixed: BTreeMap<String, f64>,
}

impl MarginsRequest {
    pub fn new(moderator: &str, grid: Vec<f64>) -> Self {
        Self {
            moderator: moderator.to_string(),
            grid,
            branch: None,
            fixed: BTreeMap::new(),
        }
    }

    pub fn with_branch(mut self, branch: &str) -> Self {
        self.branch = Some(branch.to_string());
        self
    }

    pub fn with_fixed(mut self, factor: &str, value: f64) -> Self {
        self.fixed.insert(factor.to_string(), value);
        self
    }

    /// `n` evenly spaced points across the moderator's sample range.
    pub fn over_support(fit: &FitResult, moderator: &str, n: usize) -> Result<Self, MarginsError> {
        let &(lo, hi) = fit
            .factor_ranges
            .get(moderator)
            .ok_or_else(|| MarginsError::UnknownFactor(moderator.to_string()))?;
        let grid = match n {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            _ => (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect(),
        };
        Ok(Self::new(moderator, grid))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginPoint {
    pub branch: Option<f64>,
    pub moderator: f64,
    pub prediction: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// d prediction / d moderator on one branch (or their difference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSlope {
    pub branch: Option<f64>,
    pub slope: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margins {
    pub model: String,
    pub moderator: String,
    pub branch: Option<String>,
    pub points: Vec<MarginPoint>,
    pub slopes: Vec<BranchSlope>,
    /// Slope on branch 1 minus slope on branch 0.
    pub slope_difference: Option<BranchSlope>,
    pub warnings: Vec<String>,
}

struct Evaluator<'a> {
    fit: &'a FitResult,
    request: &'a MarginsRequest,
}

impl Evaluator<'_> {
    fn factor_value(&self, label: &str, moderator: f64, branch: Option<f64>) -> f64 {
        if label == self.request.moderator {
            moderator
        } else if self.request.branch.as_deref() == Some(label) {
            branch.expect("branch value supplied with branch factor")
        } else if let Some(&v) = self.request.fixed.get(label) {
            v
        } else {
            self.fit.factor_means[label]
        }
    }

    /// Gradient of the prediction with respect to the coefficients.
    fn prediction_gradient(&self, moderator: f64, branch: Option<f64>) -> Vec<f64> {
        self.fit
            .coefficients
            .iter()
            .map(|c| match &c.kind {
                CoefficientKind::Constant => 1.0,
                CoefficientKind::Dummy { .. } => c.column_mean,
                CoefficientKind::Term { factors } => factors
                    .iter()
                    .map(|f| self.factor_value(f, moderator, branch))
                    .product(),
            })
            .collect()
    }

    /// Gradient of d prediction / d moderator; each term is linear in the
    /// moderator, so this does not depend on the grid point.
    fn slope_gradient(&self, branch: Option<f64>) -> Vec<f64> {
        self.fit
            .coefficients
            .iter()
            .map(|c| match &c.kind {
                CoefficientKind::Term { factors } if factors.contains(&self.request.moderator) => {
                    factors
                        .iter()
                        .filter(|f| **f != self.request.moderator)
                        .map(|f| self.factor_value(f, 0.0, branch))
                        .product()
                }
                _ => 0.0,
            })
            .collect()
    }
}

fn combine(fit: &FitResult, gradient: &[f64]) -> (f64, f64) {
    let estimate: f64 = gradient
        .iter()
        .zip(&fit.coefficients)
        .map(|(g, c)| g * c.estimate)
        .sum();
    let variance = quadratic_form(&fit.covariance, gradient).max(0.0);
    (estimate, variance.sqrt())
}

fn slope(fit: &FitResult, branch: Option<f64>, gradient: &[f64], t_crit: f64) -> BranchSlope {
    let (slope, se) = combine(fit, gradient);
    BranchSlope {
        branch,
        slope,
        std_error: se,
        p_value: t_two_sided_p(slope / se, fit.df_resid as f64),
        ci_low: slope - t_crit * se,
        ci_high: slope + t_crit * se,
    }
}

/// Predictions with all other factors at their sample means (products of
/// factor means for interactions) and dummies at their column means.
pub fn marginal_effects(fit: &FitResult, request: &MarginsRequest) -> Result<Margins, MarginsError> {
    if request.grid.is_empty() {
        return Err(MarginsError::EmptyGrid);
    }
    let labels = std::iter::once(&request.moderator)
        .chain(request.branch.as_ref())
        .chain(request.fixed.keys());
    for label in labels {
        if !fit.factor_means.contains_key(label) {
            return Err(MarginsError::UnknownFactor(label.clone()));
        }
    }
    let uses_moderator = fit.coefficients.iter().any(|c| {
        matches!(&c.kind, CoefficientKind::Term { factors } if factors.contains(&request.moderator))
    });
    if !uses_moderator {
        return Err(MarginsError::ModeratorAbsent(request.moderator.clone()));
    }

    let eval = Evaluator { fit, request };
    let t_crit = t_critical(0.05, fit.df_resid as f64);
    let mut warnings = Vec::new();
    let (lo, hi) = fit.factor_ranges[&request.moderator];
    let outside = request.grid.iter().filter(|&&x| x < lo || x > hi).count();
    if outside > 0 {
        warnings.push(format!(
            "{outside} grid point(s) outside the observed range [{lo}, {hi}] of `{}`",
            request.moderator
        ));
    }

    let branches: Vec<Option<f64>> = match request.branch {
        Some(_) => vec![Some(0.0), Some(1.0)],
        None => vec![None],
    };
    let mut points = Vec::new();
    let mut slopes = Vec::new();
    let mut slope_gradients = Vec::new();
    for &b in &branches {
        for &x in &request.grid {
            let (prediction, se) = combine(fit, &eval.prediction_gradient(x, b));
            points.push(MarginPoint {
                branch: b,
                moderator: x,
                prediction,
                std_error: se,
                ci_low: prediction - t_crit * se,
                ci_high: prediction + t_crit * se,
            });
        }
        let g = eval.slope_gradient(b);
        slopes.push(slope(fit, b, &g, t_crit));
        slope_gradients.push(g);
    }
    let slope_difference = (slope_gradients.len() == 2).then(|| {
        let diff: Vec<f64> = slope_gradients[1]
            .iter()
            .zip(&slope_gradients[0])
            .map(|(a, b)| a - b)
            .collect();
        slope(fit, None, &diff, t_crit)
    });

    Ok(Margins {
        model: fit.model.clone(),
        moderator: request.moderator.clone(),
        branch: request.branch.clone(),
        points,
        slopes,
        slope_difference,
        warnings,
    })
}
