//! Synthetic corpora with known ground truth.
//!
//! Randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) keyed with
//! the configured seed as a little-endian u64 in the first eight key bytes,
//! the remaining key bytes zero. Independent parts of the generator read
//! separate ChaCha streams (see [`Stream`]), so changing, say, the reference
//! process leaves editor schedules untouched. Variates are drawn with
//! `rand_distr`.
//!
//! Generation order is: editor roster and powers, editor schedules, article
//! structure (dates, teams, subject areas, repeat-author cliques), reference
//! lists, and finally outcomes (citations and acceptance times) in the
//! configured [`CausalOrder`].

mod generate;
mod names;
mod power;
mod truth;

use serde::{Deserialize, Serialize};

pub use generate::{generate, write_outputs, SynthCorpus};
pub use names::{NameFactory, Namespace};
pub use power::{gini_sorted, tune_powers, PowerDraw};
pub use truth::{ArticleTruth, EditorTruth, GroundTruth, StratumTruth};

/// Latest acceptance time the generator emits, in days.
pub const MAX_DURATION_DAYS: i64 = 1927;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("target Gini {target} is not reachable with the configured size bounds (range {low:.3}..{high:.3})")]
    UnreachableGini { target: f64, low: f64, high: f64 },
    #[error("impact model predictors already explain variance {0:.3} >= 1 of the latent impact")]
    ImpactVariance(f64),
}

/// Which outcome is generated first. The later outcome may depend on the
/// earlier one; the earlier one omits the later from its linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalOrder {
    /// Citations first, then acceptance time depends on z.
    ImpactFirst,
    /// Acceptance time first, then citations depend on ln(1+Δ).
    AcceptanceFirst,
}

/// ChaCha stream numbers used by the generator.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Editors = 1,
    Articles = 2,
    References = 3,
    Outcomes = 4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    /// Target mean N_E.
    pub mean_articles: f64,
    /// Upper bound on N_E.
    pub max_articles: usize,
    /// Pareto tail exponent α in N ∝ U^{-1/α}; ignored when `target_gini` is set.
    pub exponent: f64,
    /// Solve for α so the realized N_E Gini hits this value.
    pub target_gini: Option<f64>,
    /// Give every editor exactly this many articles instead.
    pub fixed_articles: Option<usize>,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            mean_articles: 20.0,
            max_articles: 320,
            exponent: 1.5,
            target_gini: Some(0.58),
            fixed_articles: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Earliest editor start year.
    pub first_year: i32,
    /// Latest acceptance year.
    pub last_year: i32,
    /// Shortest editor service window in days.
    pub min_service_days: i64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            first_year: 2007,
            last_year: 2015,
            min_service_days: 180,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxonomyConfig {
    /// Article shares of the six refined subject areas.
    pub sa_shares: [f64; 6],
    pub keywords_per_class: usize,
    pub keywords_per_article: usize,
    /// Probability that a non-Biology article also lists Biology.
    pub biology_co_listing: f64,
}

impl Default for TaxonomyConfig {
    fn default() -> Self {
        Self {
            sa_shares: [0.35, 0.25, 0.15, 0.04, 0.03, 0.18],
            keywords_per_class: 120,
            keywords_per_article: 8,
            biology_co_listing: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeamConfig {
    /// Team size is 1 + Poisson(mean_extra_authors).
    pub mean_extra_authors: f64,
}

impl Default for TeamConfig {
    fn default() -> Self {
        Self {
            mean_extra_authors: 4.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepeatConfig {
    /// Mean of the per-editor Beta-distributed share of articles with a repeat author.
    pub mean_share: f64,
    /// α + β of that Beta distribution.
    pub concentration: f64,
    /// Articles sharing one repeat author.
    pub clique_size: usize,
}

impl Default for RepeatConfig {
    fn default() -> Self {
        Self {
            mean_share: 0.14,
            concentration: 14.0,
            clique_size: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    /// Reference-list length is Poisson with this mean.
    pub mean_references: f64,
    /// Authors per reference is 1 + Poisson(mean − 1).
    pub mean_reference_authors: f64,
    /// Distinct non-editor names references draw from.
    pub cited_pool_size: usize,
    /// Median per-reference probability of citing the editor.
    pub base_rate: f64,
    /// Log-scale spread of editor base rates.
    pub base_rate_spread: f64,
    /// C_E ∝ N_E^γ scaling: base rates are multiplied by (N_E / mean)^(γ − 1).
    pub rate_scaling_exponent: f64,
    /// Share of non-degenerate editors with elevated rates on R = 1 articles.
    pub biased_fraction: f64,
    /// f₁ − f₀ for biased editors.
    pub bias_gap: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            mean_references: 30.0,
            mean_reference_authors: 2.0,
            cited_pool_size: 20_000,
            base_rate: 0.0025,
            base_rate_spread: 0.5,
            rate_scaling_exponent: 1.0,
            biased_fraction: 0.05,
            bias_gap: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CitationConfig {
    /// Location of ln(1+c) for articles from `schedule.last_year`.
    pub mu_last_year: f64,
    /// Added to the location per year of age.
    pub mu_per_year: f64,
    /// Added to the location per refined subject area.
    pub mu_sa_offset: [f64; 6],
    /// Scale of ln(1+c) per refined subject area.
    pub sigma: [f64; 6],
}

impl Default for CitationConfig {
    fn default() -> Self {
        Self {
            mu_last_year: 1.6,
            mu_per_year: 0.3,
            mu_sa_offset: [0.0, 0.1, -0.2, 0.2, -0.3, -0.1],
            sigma: [0.9, 0.95, 0.85, 0.9, 1.0, 0.8],
        }
    }
}

/// ln(1+Δ) = intercept + β·x + editor intercept + noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceModel {
    pub intercept: f64,
    /// Ignored under [`CausalOrder::AcceptanceFirst`].
    pub beta_z: f64,
    pub beta_ln_k: f64,
    pub beta_f: f64,
    pub beta_ln_tau: f64,
    pub beta_r: f64,
    pub beta_f_r: f64,
    pub editor_sd: f64,
    pub noise_sd: f64,
}

impl Default for AcceptanceModel {
    fn default() -> Self {
        Self {
            intercept: 4.4,
            beta_z: -0.0343,
            beta_ln_k: 0.0529,
            beta_f: -0.674,
            beta_ln_tau: 0.170,
            beta_r: -0.0878,
            beta_f_r: 0.0,
            editor_sd: 0.3,
            noise_sd: 0.5,
        }
    }
}

/// Latent impact u = β·x + editor intercept + noise, scaled to unit
/// variance by choosing the noise sd; citations are exp(μ + σu) rounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpactModel {
    pub beta_ln_k: f64,
    /// Ignored under [`CausalOrder::ImpactFirst`].
    pub beta_ln_delta: f64,
    pub beta_ln_tau: f64,
    pub beta_r: f64,
    pub beta_r_ln_tau: f64,
    pub beta_t10_r: f64,
    pub beta_t10_ln_tau: f64,
    pub beta_t10_r_ln_tau: f64,
    pub editor_sd: f64,
    /// Share of editors with a planted linear trend of z in τ.
    pub trend_fraction: f64,
    /// Absolute slope (per year) of the planted trends; half are negative.
    pub trend_slope: f64,
}

impl Default for ImpactModel {
    fn default() -> Self {
        Self {
            beta_ln_k: 0.285,
            beta_ln_delta: -0.127,
            beta_ln_tau: -0.178,
            beta_r: 0.0895,
            beta_r_ln_tau: -0.025,
            beta_t10_r: 0.0,
            beta_t10_ln_tau: 0.0445,
            beta_t10_r_ln_tau: -0.103,
            editor_sd: 0.25,
            trend_fraction: 0.0,
            trend_slope: 0.0,
        }
    }
}

impl ImpactModel {
    /// All repeat-author and top-10 effects set to zero.
    pub fn without_social_effects(mut self) -> Self {
        self.beta_r = 0.0;
        self.beta_r_ln_tau = 0.0;
        self.beta_t10_r = 0.0;
        self.beta_t10_ln_tau = 0.0;
        self.beta_t10_r_ln_tau = 0.0;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_editors: usize,
    /// Pairs of editors given the same abbreviated name.
    pub shared_name_pairs: usize,
    pub causal_order: CausalOrder,
    pub power: PowerConfig,
    pub schedule: ScheduleConfig,
    pub taxonomy: TaxonomyConfig,
    pub team: TeamConfig,
    pub repeat: RepeatConfig,
    pub references: ReferenceConfig,
    pub citation: CitationConfig,
    pub acceptance: AcceptanceModel,
    pub impact: ImpactModel,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_editors: 1000,
            shared_name_pairs: 5,
            causal_order: CausalOrder::ImpactFirst,
            power: PowerConfig::default(),
            schedule: ScheduleConfig::default(),
            taxonomy: TaxonomyConfig::default(),
            team: TeamConfig::default(),
            repeat: RepeatConfig::default(),
            references: ReferenceConfig::default(),
            citation: CitationConfig::default(),
            acceptance: AcceptanceModel::default(),
            impact: ImpactModel::default(),
        }
    }
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), SynthError> {
    if ok {
        Ok(())
    } else {
        Err(SynthError::Invalid(message()))
    }
}

fn probability(name: &str, p: f64) -> Result<(), SynthError> {
    check((0.0..=1.0).contains(&p), || format!("{name} = {p} is not a probability"))
}

fn positive(name: &str, v: f64) -> Result<(), SynthError> {
    check(v > 0.0 && v.is_finite(), || format!("{name} = {v} must be positive"))
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        check(self.n_editors > 0, || "n_editors must be positive".into())?;
        check(2 * self.shared_name_pairs <= self.n_editors, || {
            format!("{} shared-name pairs need more than {} editors", self.shared_name_pairs, self.n_editors)
        })?;
        let p = &self.power;
        check(p.max_articles >= 1, || "power.max_articles must be at least 1".into())?;
        check(p.mean_articles >= 1.0 && p.mean_articles <= p.max_articles as f64, || {
            format!("power.mean_articles = {} must lie in [1, max_articles]", p.mean_articles)
        })?;
        positive("power.exponent", p.exponent)?;
        if let Some(g) = p.target_gini {
            check((0.0..1.0).contains(&g), || format!("power.target_gini = {g} must lie in [0, 1)"))?;
        }
        if let Some(n) = p.fixed_articles {
            check(n >= 1, || "power.fixed_articles must be at least 1".into())?;
        }
        let s = &self.schedule;
        check(s.first_year <= s.last_year, || "schedule.first_year is after last_year".into())?;
        check(s.min_service_days >= 0, || "schedule.min_service_days is negative".into())?;
        let span = i64::from(s.last_year - s.first_year + 1) * 365;
        check(s.min_service_days < span, || "schedule.min_service_days exceeds the schedule span".into())?;

        let t = &self.taxonomy;
        check(t.sa_shares.iter().all(|&x| x >= 0.0) && t.sa_shares.iter().sum::<f64>() > 0.0, || {
            "taxonomy.sa_shares must be non-negative with a positive sum".into()
        })?;
        check(t.keywords_per_article >= 2, || "taxonomy.keywords_per_article must be at least 2".into())?;
        check(t.keywords_per_article <= t.keywords_per_class, || {
            "taxonomy.keywords_per_article exceeds the keyword vocabulary of a class".into()
        })?;
        probability("taxonomy.biology_co_listing", t.biology_co_listing)?;
        check(self.team.mean_extra_authors >= 0.0, || "team.mean_extra_authors is negative".into())?;

        let r = &self.repeat;
        check(r.mean_share > 0.0 && r.mean_share < 1.0, || {
            format!("repeat.mean_share = {} must lie in (0, 1)", r.mean_share)
        })?;
        positive("repeat.concentration", r.concentration)?;
        check(r.clique_size >= 2, || "repeat.clique_size must be at least 2".into())?;
        let largest = p.fixed_articles.unwrap_or(p.max_articles);
        check(r.clique_size <= largest, || {
            format!("repeat.clique_size {} exceeds the largest editor article set {largest}", r.clique_size)
        })?;

        let f = &self.references;
        check(f.mean_references >= 0.0, || "references.mean_references is negative".into())?;
        check(f.mean_reference_authors >= 1.0, || "references.mean_reference_authors must be at least 1".into())?;
        check(f.cited_pool_size > 0, || "references.cited_pool_size must be positive".into())?;
        probability("references.base_rate", f.base_rate)?;
        check(f.base_rate_spread >= 0.0, || "references.base_rate_spread is negative".into())?;
        probability("references.biased_fraction", f.biased_fraction)?;
        probability("references.bias_gap", f.bias_gap)?;

        for (i, &sigma) in self.citation.sigma.iter().enumerate() {
            positive(&format!("citation.sigma[{i}]"), sigma)?;
        }
        check(self.acceptance.editor_sd >= 0.0, || "acceptance.editor_sd is negative".into())?;
        positive("acceptance.noise_sd", self.acceptance.noise_sd)?;
        check(self.impact.editor_sd >= 0.0, || "impact.editor_sd is negative".into())?;
        probability("impact.trend_fraction", self.impact.trend_fraction)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let c = SynthConfig::default();
        c.validate().unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<SynthConfig>(&json).unwrap(), c);
        let partial: SynthConfig = serde_json::from_str(r#"{"seed": 9, "power": {"max_articles": 50}}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.power.max_articles, 50);
        assert_eq!(partial.power.mean_articles, 20.0);
    }

    #[test]
    fn rejects_infeasible() {
        let mut c = SynthConfig::default();
        c.repeat.clique_size = 400;
        assert!(matches!(c.validate(), Err(SynthError::Invalid(_))));
        let mut c = SynthConfig::default();
        c.references.bias_gap = 1.5;
        assert!(c.validate().is_err());
        let mut c = SynthConfig::default();
        c.citation.sigma[2] = 0.0;
        assert!(c.validate().is_err());
        let mut c = SynthConfig::default();
        c.shared_name_pairs = c.n_editors;
        assert!(c.validate().is_err());
    }
}
