use std::collections::BTreeMap;

use serde::Serialize;

use super::figures::POWER_LAW_EXCLUDED;
use super::tables::FitReport;
use crate::econometrics::{CoefficientKind, FitError, ModelVariant};
use crate::editor_metrics::{lorenz_gini, TOP_K};
use crate::pipeline::Analysis;
use crate::renumeration::{
    delta_c_distribution, eligible, power_law_fit, rate_tests, trend_counts, RateComparison,
    RenumerationRecord, TrendClass,
};
use crate::stats::{mean, median};
use crate::taxonomy::{sa_histogram, HistogramStage};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub articles: usize,
    pub editors: usize,
    pub editors_with_articles: usize,
    pub census_date: String,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSummary {
    pub gini: Option<f64>,
    pub top10_articles: usize,
    pub top10_share: Option<f64>,
    pub top100_articles: usize,
    pub top100_share: Option<f64>,
    /// Share held by the top 10% of editors.
    pub top10pct_share: Option<f64>,
    pub bottom25pct_share: Option<f64>,
    pub mean_articles: Option<f64>,
    pub median_articles: Option<f64>,
    pub max_articles: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivitySummary {
    /// Mean Δ_A in days.
    pub mean_duration: Option<f64>,
    pub median_duration: Option<f64>,
    pub max_duration: Option<i64>,
    pub share_within_7_days: Option<f64>,
    /// Editors with N_E at or above the threshold.
    pub editors_min_n: usize,
    pub min_n: usize,
    /// Mean Δ_E over those editors.
    pub mean_editor_duration: Option<f64>,
    /// Mean d_E over those editors.
    pub mean_turnover_days: Option<f64>,
    pub mean_cov_duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CitationSummary {
    pub total_references: u64,
    pub total_editor_citations: u64,
    /// Share of articles with f_A = 0.
    pub share_f_zero: Option<f64>,
    pub mean_f_positive: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationSummary {
    pub pre_exception: Vec<u64>,
    pub post_exception: Vec<u64>,
    pub refined: Vec<u64>,
    pub unresolved: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactSummary {
    pub strata: usize,
    pub undefined_strata: usize,
    pub undefined_articles: usize,
    pub impact_sample: usize,
    pub duration_sample: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiesSummary {
    /// Share of articles with R = 1.
    pub share_repeat: Option<f64>,
    pub blacklist_size: usize,
    pub degenerate_editors: usize,
    /// Over editors with N_E at or above the metrics threshold.
    pub mean_repeat_authors: Option<f64>,
    pub mean_rho: Option<f64>,
    pub median_rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub estimate: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub standardized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub n_obs: Option<usize>,
    pub n_clusters: Option<usize>,
    pub adj_r2_within: Option<f64>,
    pub f_stat: Option<f64>,
    pub df_model: Option<usize>,
    /// Non-dummy coefficients.
    pub coefficients: BTreeMap<String, CoefficientSummary>,
    /// Slope difference between the R branches of the plotted margins.
    pub margins_slope_difference: Option<f64>,
    pub margins_slope_difference_p: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCView {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub upper_threshold: f64,
    pub lower_threshold: f64,
    pub right_outliers: usize,
    pub left_outliers: usize,
    pub right_outlier_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawView {
    pub gamma: f64,
    pub std_error: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendCounts {
    pub positive: usize,
    pub negative: usize,
    pub none: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenumerationSummary {
    pub min_n: usize,
    pub records: usize,
    pub eligible: usize,
    pub mean_f0: Option<f64>,
    pub mean_f1: Option<f64>,
    pub delta_c: Option<DeltaCView>,
    pub rate_tests: Option<RateComparison>,
    pub trend_counts: TrendCounts,
    pub power_law: BTreeMap<String, Option<PowerLawView>>,
    pub errors: Vec<String>,
}

/// Headline statistics of a corpus run; every section is present even when
/// the corpus is too small for some statistics, which are then `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub corpus: CorpusSummary,
    pub power: PowerSummary,
    pub activity: ActivitySummary,
    pub citations: CitationSummary,
    pub classification: ClassificationSummary,
    pub impact: ImpactSummary,
    pub ties: TiesSummary,
    pub models: BTreeMap<String, ModelSummary>,
    pub renumeration: RenumerationSummary,
}

fn share(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| part as f64 / whole as f64)
}

fn top_share(sorted_desc: &[usize], k: usize, total: usize) -> (usize, Option<f64>) {
    let top: usize = sorted_desc.iter().take(k).sum();
    (top, share(top, total))
}

fn model_summary(fit: &Result<FitReport, FitError>) -> ModelSummary {
    match fit {
        Err(e) => ModelSummary {
            n_obs: None,
            n_clusters: None,
            adj_r2_within: None,
            f_stat: None,
            df_model: None,
            coefficients: BTreeMap::new(),
            margins_slope_difference: None,
            margins_slope_difference_p: None,
            error: Some(e.to_string()),
        },
        Ok(f) => {
            let difference = f.margins.as_ref().and_then(|m| m.slope_difference);
            ModelSummary {
                n_obs: Some(f.n_obs),
                n_clusters: Some(f.n_clusters),
                adj_r2_within: Some(f.adj_r2_within),
                f_stat: f.f_stat,
                df_model: Some(f.df_model),
                coefficients: f
                    .coefficients
                    .iter()
                    .filter(|c| !matches!(c.kind, CoefficientKind::Dummy { .. }))
                    .map(|c| {
                        (
                            c.name.clone(),
                            CoefficientSummary {
                                estimate: c.estimate,
                                std_error: c.std_error,
                                p_value: c.p_value,
                                standardized: c.standardized,
                            },
                        )
                    })
                    .collect(),
                margins_slope_difference: difference.map(|d| d.slope),
                margins_slope_difference_p: difference.map(|d| d.p_value),
                error: None,
            }
        }
    }
}

fn renumeration_summary(analysis: &Analysis, records: &[RenumerationRecord]) -> RenumerationSummary {
    let mut errors = Vec::new();
    let delta_c = match delta_c_distribution(records) {
        Ok(d) => Some(DeltaCView {
            n: d.n,
            mean: d.mean,
            sd: d.sd,
            skewness: d.skewness,
            upper_threshold: d.upper_threshold,
            lower_threshold: d.lower_threshold,
            right_outliers: d.right_outliers,
            left_outliers: d.left_outliers,
            right_outlier_ids: d.right_outlier_ids,
        }),
        Err(e) => {
            errors.push(format!("delta_c: {e}"));
            None
        }
    };
    let rate_tests = rate_tests(records)
        .map_err(|e| errors.push(format!("rate_tests: {e}")))
        .ok();
    let power_law = [TrendClass::Positive, TrendClass::Negative]
        .into_iter()
        .map(|class| {
            let fit = power_law_fit(records, class, POWER_LAW_EXCLUDED)
                .map(|f| PowerLawView {
                    gamma: f.gamma,
                    std_error: f.std_error,
                    n_points: f.n_points,
                })
                .map_err(|e| errors.push(format!("power_law {}: {e}", class.as_str())))
                .ok();
            (class.as_str().to_string(), fit)
        })
        .collect();
    let [positive, negative, none] = trend_counts(records);
    let f0: Vec<f64> = eligible(records).filter_map(|r| r.f0).collect();
    let f1: Vec<f64> = eligible(records).filter_map(|r| r.f1).collect();
    RenumerationSummary {
        min_n: analysis.options.renumeration.min_articles,
        records: records.len(),
        eligible: f0.len(),
        mean_f0: mean(&f0),
        mean_f1: mean(&f1),
        delta_c,
        rate_tests,
        trend_counts: TrendCounts {
            positive,
            negative,
            none,
        },
        power_law,
        errors,
    }
}

pub fn summarize(
    analysis: &Analysis,
    fits: &BTreeMap<ModelVariant, Result<FitReport, FitError>>,
    records: &[RenumerationRecord],
) -> Summary {
    let articles = analysis.corpus.articles();
    let n = articles.len();
    let profiles = &analysis.metrics.profiles;
    let min_n = analysis.options.min_articles;

    let mut counts: Vec<usize> = profiles.iter().map(|p| p.n_articles).collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let n_e: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let lorenz = lorenz_gini(&n_e).ok();
    let (top10_articles, top10_share) = top_share(&counts, TOP_K, n);
    let (top100_articles, top100_share) = top_share(&counts, 100, n);
    let top_decile = counts.len().div_ceil(10);
    let power = PowerSummary {
        gini: lorenz.as_ref().map(|l| l.gini),
        top10_articles,
        top10_share,
        top100_articles,
        top100_share,
        top10pct_share: top_share(&counts, top_decile, n).1.filter(|_| !counts.is_empty()),
        bottom25pct_share: lorenz.as_ref().map(|l| l.bottom_share(0.25)),
        mean_articles: mean(&n_e),
        median_articles: median(&n_e),
        max_articles: counts.first().copied(),
    };

    let durations: Vec<f64> = articles.iter().map(|a| a.duration_days() as f64).collect();
    let active: Vec<usize> = (0..profiles.len()).filter(|&p| profiles[p].n_articles >= min_n).collect();
    let over_active = |f: &dyn Fn(usize) -> Option<f64>| -> Option<f64> {
        mean(&active.iter().filter_map(|&p| f(p)).collect::<Vec<_>>())
    };
    let activity = ActivitySummary {
        mean_duration: mean(&durations),
        median_duration: median(&durations),
        max_duration: articles.iter().map(|a| a.duration_days()).max(),
        share_within_7_days: share(articles.iter().filter(|a| a.duration_days() <= 7).count(), n),
        editors_min_n: active.len(),
        min_n,
        mean_editor_duration: over_active(&|p| Some(profiles[p].mean_duration)),
        mean_turnover_days: over_active(&|p| Some(profiles[p].turnover_days)),
        mean_cov_duration: over_active(&|p| profiles[p].cov_duration),
    };

    let am = &analysis.metrics.articles;
    let positive_f: Vec<f64> = am.iter().map(|m| m.f).filter(|&f| f > 0.0).collect();
    let citations = CitationSummary {
        total_references: am.iter().map(|m| m.references).sum(),
        total_editor_citations: am.iter().map(|m| m.editor_citations).sum(),
        share_f_zero: share(n - positive_f.len(), n),
        mean_f_positive: mean(&positive_f),
    };

    let refined = sa_histogram(&analysis.classes, HistogramStage::Refined);
    let classification = ClassificationSummary {
        pre_exception: sa_histogram(&analysis.classes, HistogramStage::PreException).counts,
        post_exception: sa_histogram(&analysis.classes, HistogramStage::PostException).counts,
        unresolved: refined.unresolved,
        refined: refined.counts,
    };

    let (undefined_strata, undefined_articles) = analysis.impact.undefined_strata();
    let count_mask = |v: ModelVariant| analysis.model_data.mask(v).iter().filter(|&&b| b).count();
    let impact = ImpactSummary {
        strata: analysis.impact.strata.len(),
        undefined_strata,
        undefined_articles,
        impact_sample: count_mask(ModelVariant::I),
        duration_sample: count_mask(ModelVariant::II),
    };

    let tie_editors = &analysis.ties.editors;
    let rho: Vec<f64> = active.iter().map(|&p| tie_editors[p].rho).collect();
    let ties = TiesSummary {
        share_repeat: (n > 0).then(|| analysis.ties.repeat_share()),
        blacklist_size: analysis.blacklist.len(),
        degenerate_editors: analysis.corpus.editors().iter().filter(|e| e.degenerate).count(),
        mean_repeat_authors: mean(&active.iter().map(|&p| tie_editors[p].repeat_authors as f64).collect::<Vec<_>>()),
        mean_rho: mean(&rho),
        median_rho: median(&rho),
    };

    let years = articles.iter().map(|a| a.year);
    Summary {
        corpus: CorpusSummary {
            articles: n,
            editors: analysis.corpus.editors().len(),
            editors_with_articles: profiles.len(),
            census_date: analysis.corpus.census_date().to_string(),
            first_year: years.clone().min(),
            last_year: years.max(),
        },
        power,
        activity,
        citations,
        classification,
        impact,
        ties,
        models: fits.iter().map(|(v, f)| (v.as_str().to_string(), model_summary(f))).collect(),
        renumeration: renumeration_summary(analysis, records),
    }
}
