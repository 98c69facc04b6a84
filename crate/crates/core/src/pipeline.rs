//! In-memory chaining of the analysis stages.
//!
//! classify → normalize → metrics → ties → model data. Each stage consumes
//! only the artifacts of earlier ones, so callers that cache stages on disk
//! can reproduce [`Analysis`] piecewise.

use crate::corpus::Corpus;
use crate::econometrics::{FitError, FitResult, ModelData, ModelVariant, DEFAULT_MIN_ARTICLES};
use crate::editor_metrics::{build_profiles, EditorMetrics};
use crate::impact::{normalize, ImpactOptions, ImpactTable};
use crate::renumeration::{conditional_rates, RenumerationOptions, RenumerationRecord};
use crate::social::{tag_repeat_authors, SurnameBlacklist, TieAnnotation};
use crate::taxonomy::{classify_corpus, Classification, KeywordWeightTable};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    /// Minimum N_E for the regression samples and the filtered histograms.
    pub min_articles: usize,
    pub impact: ImpactOptions,
    pub renumeration: RenumerationOptions,
    /// Replaces the blacklist derived from degenerate editors.
    pub blacklist_override: Option<SurnameBlacklist>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            min_articles: DEFAULT_MIN_ARTICLES,
            impact: ImpactOptions::default(),
            renumeration: RenumerationOptions::default(),
            blacklist_override: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub corpus: Corpus,
    pub options: PipelineOptions,
    pub weights: KeywordWeightTable,
    pub classes: Vec<Classification>,
    pub impact: ImpactTable,
    pub metrics: EditorMetrics,
    pub blacklist: SurnameBlacklist,
    pub ties: TieAnnotation,
    pub model_data: ModelData,
}

impl Analysis {
    pub fn run(corpus: Corpus, options: PipelineOptions) -> Self {
        let weights = KeywordWeightTable::build(&corpus);
        let classes = classify_corpus(&corpus, &weights);
        let impact = normalize(&corpus, &classes, &options.impact);
        let metrics = build_profiles(&corpus);
        let blacklist = options
            .blacklist_override
            .clone()
            .unwrap_or_else(|| SurnameBlacklist::build(corpus.editors()));
        let ties = tag_repeat_authors(&corpus, &metrics, &blacklist);
        let model_data = ModelData::build(&corpus, &impact, &metrics, &ties, options.min_articles);
        Self {
            corpus,
            options,
            weights,
            classes,
            impact,
            metrics,
            blacklist,
            ties,
            model_data,
        }
    }

    pub fn fit(&self, variant: ModelVariant) -> Result<FitResult, FitError> {
        self.model_data.fit(variant)
    }

    pub fn renumeration(&self) -> Vec<RenumerationRecord> {
        conditional_rates(&self.metrics, &self.ties, &self.impact, &self.options.renumeration)
    }
}
