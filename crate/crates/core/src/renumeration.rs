//! Conditional editor-citation rates and the excess-citation statistic.
//!
//! For an editor with article set split by R, f₁ = C_{E,R=1}/C_{R=1} and
//! f₀ = C_{E,R=0}/C_{R=0} are reference-weighted citation rates, and
//! ΔC_E = (f₁ − f₀)·T_E is the number of editor citations in excess of what
//! the non-repeat-author rate would produce.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::editor_metrics::{histogram, Bin, EditorMetrics, EditorProfile, DEFAULT_BINS};
use crate::impact::ImpactTable;
use crate::social::TieAnnotation;
use crate::stats::{mean, simple_ols, two_sample_tests, Moments, SimpleFit, TwoSampleTests};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenumerationError {
    #[error("need at least 3 ΔC values, found {0}")]
    TooFewRecords(usize),
    #[error("ΔC values have zero spread")]
    ZeroSpread,
    #[error("need at least 2 editors with both rates defined, found {0}")]
    TooFewRates(usize),
    #[error("power-law fit for `{class}` needs at least 3 points, found {found}")]
    TooFewPoints { class: &'static str, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenumerationOptions {
    /// Minimum N_E for an editor to get a record.
    pub min_articles: usize,
    /// Significance level for trend classification.
    pub trend_alpha: f64,
    /// Articles after this year do not enter the trend fit.
    pub last_model_year: i32,
}

impl Default for RenumerationOptions {
    fn default() -> Self {
        Self {
            min_articles: 20,
            trend_alpha: 0.1,
            last_model_year: 2014,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendClass {
    Positive,
    Negative,
    None,
}

impl TrendClass {
    pub const ALL: [TrendClass; 3] = [TrendClass::Positive, TrendClass::Negative, TrendClass::None];

    pub fn as_str(self) -> &'static str {
        match self {
            TrendClass::Positive => "positive",
            TrendClass::Negative => "negative",
            TrendClass::None => "none",
        }
    }
}

/// OLS of z on τ over one editor's articles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EditorTrend {
    /// Articles entering the fit.
    pub n: usize,
    /// β_τ in z per year; `None` when fewer than 3 usable articles or τ is constant.
    pub slope: Option<f64>,
    pub std_error: Option<f64>,
    pub p_value: Option<f64>,
    pub class: TrendClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenumerationRecord {
    /// Index into the profile list.
    pub profile: usize,
    pub editor_id: String,
    pub n_articles: usize,
    pub degenerate: bool,
    /// C_{R=1}: references in R = 1 articles.
    pub refs_repeat: u64,
    /// C_{R=0}.
    pub refs_other: u64,
    /// C_{E,R=1}: editor-citing references in R = 1 articles.
    pub cites_repeat: u64,
    /// C_{E,R=0}.
    pub cites_other: u64,
    /// T_E = C_{R=0} + C_{R=1}.
    pub total_references: u64,
    /// C_E = C_{E,R=0} + C_{E,R=1}.
    pub editor_citations: u64,
    pub f1: Option<f64>,
    pub f0: Option<f64>,
    /// ΔC_E rounded from the exact ratio; `None` if either rate is undefined.
    pub delta_c: Option<f64>,
    #[serde(skip)]
    pub delta_c_exact: Option<Ratio<i128>>,
    pub trend: EditorTrend,
}

impl RenumerationRecord {
    pub fn rates_defined(&self) -> bool {
        self.delta_c.is_some()
    }
}

fn exact_delta_c(cites1: u64, refs1: u64, cites0: u64, refs0: u64) -> Option<Ratio<i128>> {
    if refs1 == 0 || refs0 == 0 {
        return None;
    }
    let f1 = Ratio::new(i128::from(cites1), i128::from(refs1));
    let f0 = Ratio::new(i128::from(cites0), i128::from(refs0));
    Some((f1 - f0) * i128::from(refs1 + refs0))
}

fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Slope of z on τ for one editor, over articles with defined z and
/// t ≤ the last model year.
pub fn editor_trend(
    profile: &EditorProfile,
    metrics: &EditorMetrics,
    impact: &ImpactTable,
    options: &RenumerationOptions,
) -> EditorTrend {
    let (tau, z): (Vec<f64>, Vec<f64>) = profile
        .articles
        .iter()
        .filter_map(|&a| {
            let score = &impact.scores[a];
            let z = score.z?;
            (score.t <= options.last_model_year).then(|| (metrics.articles[a].tau, z))
        })
        .unzip();
    let fit: Option<SimpleFit> = if tau.len() >= 3 { simple_ols(&tau, &z) } else { None };
    match fit {
        Some(fit) => {
            let class = if fit.p_value < options.trend_alpha {
                if fit.slope > 0.0 {
                    TrendClass::Positive
                } else {
                    TrendClass::Negative
                }
            } else {
                TrendClass::None
            };
            EditorTrend {
                n: tau.len(),
                slope: Some(fit.slope),
                std_error: Some(fit.slope_se),
                p_value: Some(fit.p_value),
                class,
            }
        }
        None => EditorTrend {
            n: tau.len(),
            slope: None,
            std_error: None,
            p_value: None,
            class: TrendClass::None,
        },
    }
}

/// One record per editor profile with N_E ≥ `min_articles`, in profile order.
pub fn conditional_rates(
    metrics: &EditorMetrics,
    ties: &TieAnnotation,
    impact: &ImpactTable,
    options: &RenumerationOptions,
) -> Vec<RenumerationRecord> {
    metrics
        .profiles
        .par_iter()
        .enumerate()
        .filter(|(_, p)| p.n_articles >= options.min_articles)
        .map(|(index, profile)| {
            let (mut refs, mut cites) = ([0u64; 2], [0u64; 2]);
            for &a in &profile.articles {
                let side = usize::from(ties.r[a]);
                refs[side] += metrics.articles[a].references;
                cites[side] += metrics.articles[a].editor_citations;
            }
            let rate = |c: u64, r: u64| (r > 0).then(|| c as f64 / r as f64);
            let exact = exact_delta_c(cites[1], refs[1], cites[0], refs[0]);
            RenumerationRecord {
                profile: index,
                editor_id: profile.editor_id.clone(),
                n_articles: profile.n_articles,
                degenerate: profile.degenerate,
                refs_repeat: refs[1],
                refs_other: refs[0],
                cites_repeat: cites[1],
                cites_other: cites[0],
                total_references: refs[0] + refs[1],
                editor_citations: cites[0] + cites[1],
                f1: rate(cites[1], refs[1]),
                f0: rate(cites[0], refs[0]),
                delta_c: exact.as_ref().map(ratio_to_f64),
                delta_c_exact: exact,
                trend: editor_trend(profile, metrics, impact, options),
            }
        })
        .collect()
}

/// Records whose ΔC enters the distribution and the rate tests: both rates
/// defined, and not a degenerate editor (whose citations are never counted).
pub fn eligible(records: &[RenumerationRecord]) -> impl Iterator<Item = &RenumerationRecord> {
    records.iter().filter(|r| r.rates_defined() && !r.degenerate)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub sd: f64,
    /// Population skewness m₃ / m₂^{3/2}.
    pub skewness: f64,
    /// mean + 3 sd.
    pub upper_threshold: f64,
    /// mean − 3 sd.
    pub lower_threshold: f64,
    pub right_outliers: usize,
    pub left_outliers: usize,
    /// Editor ids beyond the upper threshold, in record order.
    pub right_outlier_ids: Vec<String>,
    pub bins: Vec<Bin>,
}

pub fn delta_c_distribution(records: &[RenumerationRecord]) -> Result<DeltaCSummary, RenumerationError> {
    let rows: Vec<&RenumerationRecord> = eligible(records).collect();
    let values: Vec<f64> = rows.iter().filter_map(|r| r.delta_c).collect();
    if values.len() < 3 {
        return Err(RenumerationError::TooFewRecords(values.len()));
    }
    let moments = Moments::of(&values).expect("non-empty");
    let sd = crate::stats::sample_sd(&values).expect("n >= 3");
    if sd <= 0.0 {
        return Err(RenumerationError::ZeroSpread);
    }
    let upper = moments.mean + 3.0 * sd;
    let lower = moments.mean - 3.0 * sd;
    Ok(DeltaCSummary {
        n: values.len(),
        mean: moments.mean,
        sd,
        skewness: moments.skewness().unwrap_or(0.0),
        upper_threshold: upper,
        lower_threshold: lower,
        right_outliers: values.iter().filter(|&&v| v > upper).count(),
        left_outliers: values.iter().filter(|&&v| v < lower).count(),
        right_outlier_ids: rows
            .iter()
            .filter(|r| r.delta_c.is_some_and(|v| v > upper))
            .map(|r| r.editor_id.clone())
            .collect(),
        bins: histogram(&values, DEFAULT_BINS),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateComparison {
    /// Editors with both rates defined.
    pub n_pairs: usize,
    /// Editors dropped for an undefined rate or a degenerate name.
    pub excluded: usize,
    pub mean_f0: f64,
    pub mean_f1: f64,
    pub tests: TwoSampleTests,
}

/// Welch t, Mann–Whitney and two-sample KS tests of f₀ against f₁.
pub fn rate_tests(records: &[RenumerationRecord]) -> Result<RateComparison, RenumerationError> {
    let (f0, f1): (Vec<f64>, Vec<f64>) = eligible(records)
        .map(|r| (r.f0.expect("defined"), r.f1.expect("defined")))
        .unzip();
    if f0.len() < 2 {
        return Err(RenumerationError::TooFewRates(f0.len()));
    }
    let tests = two_sample_tests(&f0, &f1).ok_or(RenumerationError::TooFewRates(f0.len()))?;
    Ok(RateComparison {
        n_pairs: f0.len(),
        excluded: records.len() - f0.len(),
        mean_f0: mean(&f0).expect("non-empty"),
        mean_f1: mean(&f1).expect("non-empty"),
        tests,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub class: TrendClass,
    pub n_points: usize,
    /// Editors dropped for C_E = 0.
    pub excluded_zero: usize,
    /// Editors dropped as the largest N_E in the class.
    pub excluded_top: usize,
    /// Slope of log₁₀ C_E on log₁₀ N_E.
    pub gamma: f64,
    pub std_error: f64,
    pub intercept: f64,
}

/// Power-law exponent of C_E against N_E within one trend class, ignoring
/// the `exclude_top` editors with the largest N_E (ties by editor id).
pub fn power_law_fit(
    records: &[RenumerationRecord],
    class: TrendClass,
    exclude_top: usize,
) -> Result<PowerLawFit, RenumerationError> {
    let mut members: Vec<&RenumerationRecord> = records
        .iter()
        .filter(|r| r.trend.class == class && !r.degenerate)
        .collect();
    members.sort_by(|a, b| {
        b.n_articles
            .cmp(&a.n_articles)
            .then_with(|| a.editor_id.cmp(&b.editor_id))
    });
    let excluded_top = exclude_top.min(members.len());
    let rest = &members[excluded_top..];
    let positive: Vec<&&RenumerationRecord> = rest.iter().filter(|r| r.editor_citations > 0).collect();
    let excluded_zero = rest.len() - positive.len();
    let x: Vec<f64> = positive.iter().map(|r| (r.n_articles as f64).log10()).collect();
    let y: Vec<f64> = positive.iter().map(|r| (r.editor_citations as f64).log10()).collect();
    let too_few = RenumerationError::TooFewPoints {
        class: class.as_str(),
        found: x.len(),
    };
    if x.len() < 3 {
        return Err(too_few);
    }
    let fit = simple_ols(&x, &y).ok_or(too_few)?;
    Ok(PowerLawFit {
        class,
        n_points: x.len(),
        excluded_zero,
        excluded_top,
        gamma: fit.slope,
        std_error: fit.slope_se,
        intercept: fit.intercept,
    })
}

/// Trend-class counts (positive, negative, none).
pub fn trend_counts(records: &[RenumerationRecord]) -> [usize; 3] {
    let mut counts = [0; 3];
    for r in records {
        let i = TrendClass::ALL.iter().position(|&c| c == r.trend.class).expect("known class");
        counts[i] += 1;
    }
    counts
}
