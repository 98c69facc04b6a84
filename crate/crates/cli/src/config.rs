//! Flat `key = value` pipeline configuration.
//!
//! One setting per line; blank lines and lines starting with `#` are
//! ignored. Keys are case-sensitive, unknown or repeated keys are errors,
//! and relative paths resolve against the directory of the config file.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `articles` | | articles.jsonl input |
//! | `editors` | | editors.jsonl input |
//! | `corpus` | | a `corpus.bin` cache used instead of the two JSONL files |
//! | `synth_config` | | a synth JSON config; the corpus is generated in memory |
//! | `seed` | | overrides the seed of `synth_config` |
//! | `corpus_cache` | | where to write the ingested `corpus.bin` |
//! | `out_dir` | required | report directory |
//! | `census_date` | 2016-12-03 | latest admissible acceptance date |
//! | `min_n_metrics` | 10 | minimum N_E of the regression samples and filtered histograms |
//! | `min_n_renumeration` | 20 | minimum N_E of a renumeration record |
//! | `trend_alpha` | 0.1 | significance level of the impact-trend classes |
//! | `first_year` | 2007 | earlier articles are pooled into this year |
//! | `last_model_year` | 2014 | later articles stay out of the impact model and trend fits |
//! | `models` | all | comma-separated model variants to fit |
//! | `blacklist_override` | | surname list replacing the derived blacklist |
//!
//! Exactly one corpus source (`articles` + `editors`, `corpus`, or
//! `synth_config`) must be given.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use forensics_core::corpus::default_census_date;
use forensics_core::econometrics::ModelVariant;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` is set twice")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: {message}")]
    Value { key: &'static str, message: String },
    #[error("{0}")]
    Source(String),
}

const KEYS: [&str; 15] = [
    "articles",
    "editors",
    "corpus",
    "synth_config",
    "seed",
    "corpus_cache",
    "out_dir",
    "census_date",
    "min_n_metrics",
    "min_n_renumeration",
    "trend_alpha",
    "first_year",
    "last_model_year",
    "models",
    "blacklist_override",
];

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Jsonl { articles: PathBuf, editors: PathBuf },
    Cache(PathBuf),
    Synth { config: PathBuf, seed: Option<u64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: CorpusSource,
    pub corpus_cache: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub census_date: NaiveDate,
    pub min_n_metrics: usize,
    pub min_n_renumeration: usize,
    pub trend_alpha: f64,
    pub first_year: i32,
    pub last_model_year: i32,
    pub models: Vec<ModelVariant>,
    pub blacklist_override: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &'static str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError::Value {
        key,
        message: format!("`{raw}`: {e}"),
    })
}

impl PipelineConfig {
    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Source(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut raw: BTreeMap<&'static str, String> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: line_no })?;
            let key = key.trim();
            let known = KEYS.iter().find(|&&k| k == key).ok_or_else(|| ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            })?;
            if raw.insert(known, value.trim().to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    line: line_no,
                    key: key.to_string(),
                });
            }
        }
        let path = |key: &str| raw.get(key).map(|v| base.join(v));

        let source = match (path("articles"), path("editors"), path("corpus"), path("synth_config")) {
            (Some(articles), Some(editors), None, None) => CorpusSource::Jsonl { articles, editors },
            (None, None, Some(cache), None) => CorpusSource::Cache(cache),
            (None, None, None, Some(config)) => CorpusSource::Synth {
                config,
                seed: raw.get("seed").map(|s| parse_value("seed", s)).transpose()?,
            },
            _ => {
                return Err(ConfigError::Source(
                    "give exactly one corpus source: `articles` and `editors`, `corpus`, or `synth_config`".into(),
                ))
            }
        };
        if raw.contains_key("seed") && !matches!(source, CorpusSource::Synth { .. }) {
            return Err(ConfigError::Value {
                key: "seed",
                message: "only applies together with `synth_config`".into(),
            });
        }
        let out_dir = path("out_dir").ok_or(ConfigError::Value {
            key: "out_dir",
            message: "is required".into(),
        })?;
        let models = match raw.get("models") {
            None => ModelVariant::ALL.to_vec(),
            Some(list) => {
                let mut models = Vec::new();
                for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let v: ModelVariant = parse_value("models", name)?;
                    if !models.contains(&v) {
                        models.push(v);
                    }
                }
                if models.is_empty() {
                    return Err(ConfigError::Value {
                        key: "models",
                        message: "lists no model".into(),
                    });
                }
                models
            }
        };
        let census_date = match raw.get("census_date") {
            None => default_census_date(),
            Some(s) => NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| ConfigError::Value {
                key: "census_date",
                message: format!("`{s}`: {e}"),
            })?,
        };
        let trend_alpha: f64 = match raw.get("trend_alpha") {
            None => 0.1,
            Some(s) => parse_value("trend_alpha", s)?,
        };
        if !(trend_alpha > 0.0 && trend_alpha < 1.0) {
            return Err(ConfigError::Value {
                key: "trend_alpha",
                message: format!("{trend_alpha} is not in (0, 1)"),
            });
        }
        let first_year = raw.get("first_year").map(|s| parse_value("first_year", s)).transpose()?.unwrap_or(2007);
        let last_model_year = raw
            .get("last_model_year")
            .map(|s| parse_value("last_model_year", s))
            .transpose()?
            .unwrap_or(2014);
        if last_model_year < first_year {
            return Err(ConfigError::Value {
                key: "last_model_year",
                message: format!("{last_model_year} precedes first_year {first_year}"),
            });
        }
        Ok(Self {
            source,
            corpus_cache: path("corpus_cache"),
            out_dir,
            census_date,
            min_n_metrics: raw
                .get("min_n_metrics")
                .map(|s| parse_value("min_n_metrics", s))
                .transpose()?
                .unwrap_or(10),
            min_n_renumeration: raw
                .get("min_n_renumeration")
                .map(|s| parse_value("min_n_renumeration", s))
                .transpose()?
                .unwrap_or(20),
            trend_alpha,
            first_year,
            last_model_year,
            models,
            blacklist_override: path("blacklist_override"),
        })
    }

    /// Canonical text of the settings that affect the outputs, used as the
    /// config part of the cache key. Paths are excluded; their contents are
    /// hashed separately.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        let source = match &self.source {
            CorpusSource::Jsonl { .. } => "jsonl".to_string(),
            CorpusSource::Cache(_) => "cache".to_string(),
            CorpusSource::Synth { seed, .. } => format!("synth seed={seed:?}"),
        };
        writeln!(s, "source={source}").unwrap();
        writeln!(s, "census_date={}", self.census_date).unwrap();
        writeln!(s, "min_n_metrics={}", self.min_n_metrics).unwrap();
        writeln!(s, "min_n_renumeration={}", self.min_n_renumeration).unwrap();
        writeln!(s, "trend_alpha={:e}", self.trend_alpha).unwrap();
        writeln!(s, "first_year={}", self.first_year).unwrap();
        writeln!(s, "last_model_year={}", self.last_model_year).unwrap();
        let models: Vec<&str> = self.models.iter().map(|m| m.as_str()).collect();
        writeln!(s, "models={}", models.join(",")).unwrap();
        writeln!(s, "blacklist_override={}", self.blacklist_override.is_some()).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PipelineConfig, ConfigError> {
        PipelineConfig::parse(text, Path::new("/base"))
    }

    #[test]
    fn defaults_and_relative_paths() {
        let c = parse("# run\narticles = a.jsonl\neditors=/abs/e.jsonl\n\nout_dir = out\n").unwrap();
        assert_eq!(
            c.source,
            CorpusSource::Jsonl {
                articles: PathBuf::from("/base/a.jsonl"),
                editors: PathBuf::from("/abs/e.jsonl"),
            }
        );
        assert_eq!(c.out_dir, PathBuf::from("/base/out"));
        assert_eq!((c.min_n_metrics, c.min_n_renumeration), (10, 20));
        assert_eq!(c.trend_alpha, 0.1);
        assert_eq!((c.first_year, c.last_model_year), (2007, 2014));
        assert_eq!(c.models, ModelVariant::ALL.to_vec());
        assert_eq!(c.census_date, default_census_date());
    }

    #[test]
    fn models_and_thresholds() {
        let c = parse("corpus = c.bin\nout_dir = o\nmodels = II, I-rtau,II\nmin_n_metrics = 5\ntrend_alpha = 0.05").unwrap();
        assert_eq!(c.models, vec![ModelVariant::II, ModelVariant::IRtau]);
        assert_eq!(c.min_n_metrics, 5);
        assert_eq!(c.trend_alpha, 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse("corpus c.bin"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(parse("colour = red"), Err(ConfigError::UnknownKey { line: 1, .. })));
        assert!(matches!(parse("out_dir = a\nout_dir = b"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(parse("out_dir = o"), Err(ConfigError::Source(_))));
        assert!(matches!(parse("corpus = c\nsynth_config = s\nout_dir = o"), Err(ConfigError::Source(_))));
        assert!(matches!(parse("corpus = c"), Err(ConfigError::Value { key: "out_dir", .. })));
        assert!(matches!(parse("corpus = c\nout_dir = o\nmodels = III"), Err(ConfigError::Value { key: "models", .. })));
        assert!(matches!(parse("corpus = c\nout_dir = o\ntrend_alpha = 1"), Err(ConfigError::Value { .. })));
        assert!(matches!(parse("corpus = c\nout_dir = o\nseed = 3"), Err(ConfigError::Value { key: "seed", .. })));
    }

    #[test]
    fn fingerprint_tracks_settings_not_paths() {
        let a = parse("corpus = c.bin\nout_dir = o").unwrap();
        let b = parse("corpus = elsewhere.bin\nout_dir = p").unwrap();
        let c = parse("corpus = c.bin\nout_dir = o\nmin_n_metrics = 11").unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
    }
}
