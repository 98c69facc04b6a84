//! Ground-truth bookkeeping written alongside a synthetic corpus.
//!
//! `ground_truth.json` holds one [`GroundTruth`] object: the effective
//! configuration (with the tuned power-law exponent), per-editor truth, the
//! planted surname blacklist, per-stratum citation parameters, the planted
//! keyword weight table and one [`ArticleTruth`] per article in corpus order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SynthConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditorTruth {
    pub editor_id: String,
    pub surname: String,
    pub initial: String,
    pub n_articles: usize,
    /// Shares an abbreviated name with another editor.
    pub degenerate: bool,
    pub biased: bool,
    pub top10: bool,
    /// Per-reference editor-citation probability on R = 0 articles.
    pub rate_other: f64,
    /// Same on R = 1 articles.
    pub rate_repeat: f64,
    /// Planted share of articles in repeat-author cliques.
    pub repeat_share: f64,
    /// Repeat authors (one per clique).
    pub repeat_authors: usize,
    pub repeat_articles: usize,
    pub acceptance_intercept: f64,
    pub impact_intercept: f64,
    /// Planted slope of latent impact in τ (per year).
    pub impact_trend: f64,
    pub mean_duration: f64,
    pub references: u64,
    pub editor_citations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArticleTruth {
    pub editor: usize,
    /// Refined subject area 1..=6.
    pub sa: u8,
    /// Principal top-level class index 1..=10.
    pub principal: u8,
    pub repeat: bool,
    pub team_size: usize,
    pub tau: f64,
    pub duration_days: i64,
    pub references: u64,
    pub editor_citations: u64,
    pub citations: u64,
    /// Latent impact before the citation link.
    pub latent_impact: f64,
    /// z computed by the generator from its own citation counts.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumTruth {
    pub sa: u8,
    pub year: i32,
    pub mu: f64,
    pub sigma: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    /// Power-law exponent actually used (tuned when a target Gini is set).
    pub power_exponent: f64,
    pub power_scale: f64,
    pub n_articles: usize,
    pub n_editors: usize,
    /// Gini of the planted N_E over editors with at least one article.
    pub gini: f64,
    pub top10_articles: usize,
    pub top10_share: f64,
    /// Normalized surnames shared by two or more editors.
    pub blacklist: Vec<String>,
    pub repeat_articles: usize,
    pub repeat_share: f64,
    pub total_references: u64,
    pub total_editor_citations: u64,
    /// Noise sd chosen to give the latent impact unit variance.
    pub impact_noise_sd: f64,
    pub sa_counts: [u64; 6],
    pub strata: Vec<StratumTruth>,
    pub keyword_weights: BTreeMap<String, [f64; 10]>,
    pub editors: Vec<EditorTruth>,
    pub articles: Vec<ArticleTruth>,
}

impl GroundTruth {
    pub fn biased_editor_ids(&self) -> Vec<&str> {
        self.editors
            .iter()
            .filter(|e| e.biased)
            .map(|e| e.editor_id.as_str())
            .collect()
    }
}
