//! Editor fixed-effects panel regression with cluster-robust inference.
//!
//! A [`ModelSpec`] names a dependent variable, a list of [`Term`]s (products
//! of transformed variables) and categorical dummies. [`fit_fixed_effects`]
//! removes cluster means from every column, adds back the grand mean so the
//! reported constant is the average editor intercept, solves the least
//! squares problem by Householder QR, and computes the cluster-robust
//! sandwich covariance over the same clusters.

mod fit;
mod margins;
mod models;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

pub use fit::{fit_fixed_effects, Coefficient, CoefficientKind, FitError, FitResult};
pub use margins::{marginal_effects, BranchSlope, MarginPoint, Margins, MarginsError, MarginsRequest};
pub use models::{
    model_spec, ModelData, ModelVariant, UnknownModel, DAY_IN_YEARS, DEFAULT_MIN_ARTICLES,
    FACTOR_LN_DELTA, FACTOR_LN_K, FACTOR_LN_TAU, MARGIN_GRID_POINTS,
};

/// Default relative tolerance for collinear-column rejection.
pub const COLLINEARITY_TOL: f64 = 1e-10;

/// Elementwise transform applied to a variable before it enters a term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "shift")]
pub enum Transform {
    Identity,
    /// ln x
    Ln,
    /// ln(1 + x)
    Log1p,
    /// ln(x + c)
    LnShift(f64),
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Ln => x.ln(),
            Transform::Log1p => x.ln_1p(),
            Transform::LnShift(c) => (x + c).ln(),
        }
    }

    fn describe(self, variable: &str) -> String {
        match self {
            Transform::Identity => variable.to_string(),
            Transform::Ln => format!("ln({variable})"),
            Transform::Log1p => format!("ln(1+{variable})"),
            Transform::LnShift(c) => format!("ln({variable}+{c})"),
        }
    }
}

/// A transformed variable with a display label, unique within a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub label: String,
    pub variable: String,
    pub transform: Transform,
}

impl Factor {
    pub fn new(variable: &str, transform: Transform) -> Self {
        Self {
            label: transform.describe(variable),
            variable: variable.to_string(),
            transform,
        }
    }

    pub fn identity(variable: &str) -> Self {
        Self::new(variable, Transform::Identity)
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Human-readable description of the transform, e.g. `ln(1+duration)`.
    pub fn definition(&self) -> String {
        self.transform.describe(&self.variable)
    }
}

/// Product of one or more factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn main(factor: Factor) -> Self {
        Self {
            factors: vec![factor],
        }
    }

    pub fn interaction(factors: Vec<Factor>) -> Self {
        Self { factors }
    }

    pub fn name(&self) -> String {
        self.factors
            .iter()
            .map(|f| f.label.as_str())
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub name: String,
    pub dependent: Factor,
    pub terms: Vec<Term>,
    /// Categorical variables entered as dummies, smallest level omitted.
    pub dummies: Vec<String>,
    /// Description of the sample filter, for reporting.
    pub sample: String,
    pub tolerance: f64,
}

impl ModelSpec {
    pub fn new(name: &str, dependent: Factor, terms: Vec<Term>, dummies: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            dependent,
            terms,
            dummies: dummies.iter().map(|d| d.to_string()).collect(),
            sample: String::new(),
            tolerance: COLLINEARITY_TOL,
        }
    }

    pub fn with_sample(mut self, sample: &str) -> Self {
        self.sample = sample.to_string();
        self
    }
}

/// Observations grouped by cluster, with numeric and categorical columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PanelData {
    clusters: Vec<usize>,
    numeric: BTreeMap<String, Vec<f64>>,
    categorical: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("column `{name}` has {found} values, expected {expected}")]
pub struct LengthMismatch {
    pub name: String,
    pub found: usize,
    pub expected: usize,
}

impl PanelData {
    /// `clusters[i]` is the cluster (editor) of observation i.
    pub fn new(clusters: Vec<usize>) -> Self {
        Self {
            clusters,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn add_numeric(&mut self, name: &str, values: Vec<f64>) -> Result<(), LengthMismatch> {
        self.check(name, values.len())?;
        self.numeric.insert(name.to_string(), values);
        Ok(())
    }

    pub fn add_categorical(&mut self, name: &str, values: Vec<i64>) -> Result<(), LengthMismatch> {
        self.check(name, values.len())?;
        self.categorical.insert(name.to_string(), values);
        Ok(())
    }

    fn check(&self, name: &str, found: usize) -> Result<(), LengthMismatch> {
        if found == self.len() {
            Ok(())
        } else {
            Err(LengthMismatch {
                name: name.to_string(),
                found,
                expected: self.len(),
            })
        }
    }

    pub fn numeric(&self, name: &str) -> Option<&[f64]> {
        self.numeric.get(name).map(Vec::as_slice)
    }

    pub fn categorical(&self, name: &str) -> Option<&[i64]> {
        self.categorical.get(name).map(Vec::as_slice)
    }

    /// Rows where `keep` is true, in order.
    pub fn subset(&self, keep: &[bool]) -> Self {
        assert_eq!(keep.len(), self.len(), "mask length mismatch");
        let pick_f = |v: &Vec<f64>| v.iter().zip(keep).filter(|(_, &k)| k).map(|(x, _)| *x).collect();
        let pick_i = |v: &Vec<i64>| v.iter().zip(keep).filter(|(_, &k)| k).map(|(x, _)| *x).collect();
        Self {
            clusters: self
                .clusters
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(c, _)| *c)
                .collect(),
            numeric: self.numeric.iter().map(|(k, v)| (k.clone(), pick_f(v))).collect(),
            categorical: self
                .categorical
                .iter()
                .map(|(k, v)| (k.clone(), pick_i(v)))
                .collect(),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(Term::name).collect();
        write!(f, "{}: {} ~ {}", self.name, self.dependent.label, terms.join(" + "))?;
        for d in &self.dummies {
            write!(f, " + D({d})")?;
        }
        write!(f, " | editor FE")
    }
}
