//! The impact model (z on team size, acceptance time, service age and
//! repeat authorship) and the acceptance-time model, built from corpus
//! artifacts.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{
    fit_fixed_effects, FitError, FitResult, Factor, MarginsRequest, ModelSpec, PanelData, Term,
    Transform,
};
use crate::corpus::Corpus;
use crate::editor_metrics::EditorMetrics;
use crate::impact::{Exclusion, ImpactTable};
use crate::social::TieAnnotation;

/// One day in years; the offset inside ln(τ + offset).
pub const DAY_IN_YEARS: f64 = 1.0 / 365.25;

pub const FACTOR_LN_K: &str = "ln_k";
pub const FACTOR_LN_DELTA: &str = "ln_delta";
pub const FACTOR_LN_TAU: &str = "ln_tau";

/// Default minimum N_E for an editor's articles to enter either model.
pub const DEFAULT_MIN_ARTICLES: usize = 10;

/// Grid size used for the plotted marginal effects.
pub const MARGIN_GRID_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModelVariant {
    /// Impact model, main effects.
    #[serde(rename = "I")]
    I,
    /// Impact model with R × ln τ.
    #[serde(rename = "I-rtau")]
    IRtau,
    /// Impact model with the top-10 editor interactions.
    #[serde(rename = "I-top10")]
    ITop10,
    /// Acceptance-time model.
    #[serde(rename = "II")]
    II,
    /// Acceptance-time model with f × R.
    #[serde(rename = "II-fxr")]
    IIFxr,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 5] = [
        ModelVariant::I,
        ModelVariant::IRtau,
        ModelVariant::ITop10,
        ModelVariant::II,
        ModelVariant::IIFxr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::I => "I",
            ModelVariant::IRtau => "I-rtau",
            ModelVariant::ITop10 => "I-top10",
            ModelVariant::II => "II",
            ModelVariant::IIFxr => "II-fxr",
        }
    }

    pub fn is_impact_model(self) -> bool {
        matches!(self, ModelVariant::I | ModelVariant::IRtau | ModelVariant::ITop10)
    }

    /// Moderator grid request for the plotted marginal effects, if the
    /// variant has the relevant interaction.
    pub fn margins_request(self, fit: &FitResult) -> Option<MarginsRequest> {
        let (moderator, fixed) = match self {
            ModelVariant::IRtau => (FACTOR_LN_TAU, None),
            ModelVariant::ITop10 => (FACTOR_LN_TAU, Some(("T10", 1.0))),
            ModelVariant::IIFxr => ("f", None),
            _ => return None,
        };
        let mut req = MarginsRequest::over_support(fit, moderator, MARGIN_GRID_POINTS)
            .ok()?
            .with_branch("R");
        if let Some((factor, value)) = fixed {
            req = req.with_fixed(factor, value);
        }
        Some(req)
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown model `{0}` (expected I, I-rtau, I-top10, II or II-fxr)")]
pub struct UnknownModel(pub String);

impl FromStr for ModelVariant {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownModel(s.to_string()))
    }
}

fn ln_k() -> Factor {
    Factor::new("k", Transform::Ln).labeled(FACTOR_LN_K)
}

fn ln_delta() -> Factor {
    Factor::new("duration", Transform::Log1p).labeled(FACTOR_LN_DELTA)
}

fn ln_tau() -> Factor {
    Factor::new("tau", Transform::LnShift(DAY_IN_YEARS)).labeled(FACTOR_LN_TAU)
}

pub fn model_spec(variant: ModelVariant) -> ModelSpec {
    let r = Factor::identity("R");
    let t10 = Factor::identity("T10");
    let f = Factor::identity("f");
    let z = Factor::identity("z");
    let dummies = ["year", "sa"];
    match variant {
        ModelVariant::I | ModelVariant::IRtau | ModelVariant::ITop10 => {
            let mut terms = vec![
                Term::main(ln_k()),
                Term::main(ln_delta()),
                Term::main(ln_tau()),
                Term::main(r.clone()),
            ];
            if variant != ModelVariant::I {
                terms.push(Term::interaction(vec![r.clone(), ln_tau()]));
            }
            if variant == ModelVariant::ITop10 {
                terms.extend([
                    Term::main(t10.clone()),
                    Term::interaction(vec![t10.clone(), r.clone()]),
                    Term::interaction(vec![t10.clone(), ln_tau()]),
                    Term::interaction(vec![t10, r, ln_tau()]),
                ]);
            }
            ModelSpec::new(variant.as_str(), z, terms, &dummies)
                .with_sample("editors with N_E >= min_n, z defined, t <= last model year")
        }
        ModelVariant::II | ModelVariant::IIFxr => {
            let mut terms = vec![
                Term::main(z),
                Term::main(ln_k()),
                Term::main(f.clone()),
                Term::main(ln_tau()),
                Term::main(r.clone()),
            ];
            if variant == ModelVariant::IIFxr {
                terms.push(Term::interaction(vec![f, r]));
            }
            ModelSpec::new(variant.as_str(), ln_delta(), terms, &dummies)
                .with_sample("editors with N_E >= min_n, z defined")
        }
    }
}

/// Article-level regression variables for every article, with the two
/// estimation-sample masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelData {
    /// Columns z, k, duration, tau, R, f, T10 and categoricals year, sa;
    /// clusters are editor profile indices. z is NaN where undefined.
    pub panel: PanelData,
    pub min_articles: usize,
    impact_sample: Vec<bool>,
    duration_sample: Vec<bool>,
}

impl ModelData {
    pub fn build(
        corpus: &Corpus,
        impact: &ImpactTable,
        metrics: &EditorMetrics,
        ties: &TieAnnotation,
        min_articles: usize,
    ) -> Self {
        let n = corpus.len();
        let profile_of = metrics.profile_of_editor(corpus.editors().len());
        let profile: Vec<usize> = (0..n)
            .map(|a| profile_of[corpus.editor_of(a)].expect("every article has an editor profile"))
            .collect();
        let articles = corpus.articles();
        let col = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..n).map(f).collect() };

        let mut panel = PanelData::new(profile.clone());
        let columns = [
            ("z", col(&|a| impact.scores[a].z.unwrap_or(f64::NAN))),
            ("k", col(&|a| articles[a].team_size() as f64)),
            ("duration", col(&|a| articles[a].duration_days() as f64)),
            ("tau", col(&|a| metrics.articles[a].tau)),
            ("R", col(&|a| f64::from(u8::from(ties.r[a])))),
            ("f", col(&|a| metrics.articles[a].f)),
            ("T10", col(&|a| f64::from(u8::from(metrics.profiles[profile[a]].top10)))),
        ];
        for (name, values) in columns {
            panel.add_numeric(name, values).expect("column per article");
        }
        panel
            .add_categorical("year", (0..n).map(|a| i64::from(impact.scores[a].t)).collect())
            .expect("column per article");
        panel
            .add_categorical(
                "sa",
                (0..n)
                    .map(|a| impact.scores[a].s.map_or(0, |s| i64::from(s.index())))
                    .collect(),
            )
            .expect("column per article");

        let active = |a: usize| metrics.profiles[profile[a]].n_articles >= min_articles;
        let duration_sample: Vec<bool> = (0..n)
            .map(|a| active(a) && impact.scores[a].z.is_some())
            .collect();
        let impact_sample: Vec<bool> = (0..n)
            .map(|a| duration_sample[a] && impact.scores[a].excluded.is_none())
            .collect();
        debug_assert!((0..n).all(|a| {
            impact.scores[a].z.is_none()
                || matches!(impact.scores[a].excluded, None | Some(Exclusion::AfterLastModelYear))
        }));
        Self {
            panel,
            min_articles,
            impact_sample,
            duration_sample,
        }
    }

    pub fn mask(&self, variant: ModelVariant) -> &[bool] {
        if variant.is_impact_model() {
            &self.impact_sample
        } else {
            &self.duration_sample
        }
    }

    pub fn sample(&self, variant: ModelVariant) -> PanelData {
        self.panel.subset(self.mask(variant))
    }

    pub fn fit(&self, variant: ModelVariant) -> Result<FitResult, FitError> {
        fit_fixed_effects(&self.sample(variant), &model_spec(variant))
    }
}
