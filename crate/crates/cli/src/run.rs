//! Full pipeline run driven by a [`PipelineConfig`].
//!
//! The report directory holds a `manifest.json` with the sha256 of every
//! input file, a cache key over the inputs and the output-relevant settings,
//! and the sha256 of every artifact written. A rerun whose key matches and
//! whose artifacts are intact is skipped; anything else recomputes the
//! whole bundle.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use forensics_core::corpus::{ingest, Corpus, IngestOptions};
use forensics_core::impact::ImpactOptions;
use forensics_core::pipeline::{Analysis, PipelineOptions};
use forensics_core::renumeration::RenumerationOptions;
use forensics_core::report::build_bundle_with;
use forensics_core::synth::generate;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{CorpusSource, PipelineConfig};
use crate::error::{Failure, InStage, StageError};
use crate::stages::{load_corpus, read_blacklist, read_synth_config, write_corpus, write_file};

pub const MANIFEST: &str = "manifest.json";
const MANIFEST_FORMAT: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Computed,
    UpToDate,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_file(path: &Path) -> Result<String, Failure> {
    Ok(sha256_hex(&std::fs::read(path).map_err(Failure::input(path))?))
}

fn input_paths(config: &PipelineConfig) -> Vec<(&'static str, &PathBuf)> {
    let mut inputs = match &config.source {
        CorpusSource::Jsonl { articles, editors } => vec![("articles", articles), ("editors", editors)],
        CorpusSource::Cache(path) => vec![("corpus", path)],
        CorpusSource::Synth { config, .. } => vec![("synth_config", config)],
    };
    if let Some(path) = &config.blacklist_override {
        inputs.push(("blacklist_override", path));
    }
    inputs
}

/// True when the manifest in `out_dir` carries `key` and every artifact it
/// lists is present with the recorded hash.
fn up_to_date(out_dir: &Path, key: &str) -> bool {
    let Ok(text) = std::fs::read_to_string(out_dir.join(MANIFEST)) else {
        return false;
    };
    let Ok(manifest) = serde_json::from_str::<Value>(&text) else {
        return false;
    };
    if manifest.get("key").and_then(Value::as_str) != Some(key) {
        return false;
    }
    let Some(outputs) = manifest.get("outputs").and_then(Value::as_object) else {
        return false;
    };
    !outputs.is_empty()
        && outputs.iter().all(|(rel, hash)| {
            std::fs::read(out_dir.join(rel)).is_ok_and(|bytes| Some(sha256_hex(&bytes).as_str()) == hash.as_str())
        })
}

fn load(config: &PipelineConfig) -> Result<Corpus, StageError> {
    match &config.source {
        CorpusSource::Jsonl { articles, editors } => {
            let options = IngestOptions {
                census_date: config.census_date,
            };
            let ingested = ingest(articles, editors, &options).in_stage("ingest")?;
            if !ingested.diagnostics.is_empty() {
                eprintln!("ingest: {} lines rejected", ingested.diagnostics.len());
            }
            Ok(ingested.corpus)
        }
        CorpusSource::Cache(path) => load_corpus(path).in_stage("load"),
        CorpusSource::Synth { config: path, seed } => {
            let synth = read_synth_config(path, *seed).in_stage("synth")?;
            let (corpus, _) = generate(&synth).in_stage("synth")?.into_parts().in_stage("synth")?;
            Ok(corpus)
        }
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutcome, StageError> {
    let mut inputs = BTreeMap::new();
    for (name, path) in input_paths(config) {
        inputs.insert(name, hash_file(path).in_stage("load")?);
    }
    let mut keyed = config.fingerprint();
    for (name, hash) in &inputs {
        keyed.push_str(&format!("{name}={hash}\n"));
    }
    let key = sha256_hex(keyed.as_bytes());
    if up_to_date(&config.out_dir, &key) {
        return Ok(RunOutcome::UpToDate);
    }

    let corpus = load(config)?;
    if let Some(path) = &config.corpus_cache {
        write_corpus(&corpus, path).in_stage("ingest")?;
    }
    let blacklist_override = config.blacklist_override.as_deref().map(read_blacklist).transpose().in_stage("ties")?;
    let options = PipelineOptions {
        min_articles: config.min_n_metrics,
        impact: ImpactOptions {
            first_year: config.first_year,
            last_model_year: config.last_model_year,
        },
        renumeration: RenumerationOptions {
            min_articles: config.min_n_renumeration,
            trend_alpha: config.trend_alpha,
            last_model_year: config.last_model_year,
        },
        blacklist_override,
    };
    let analysis = Analysis::run(corpus, options);
    let bundle = build_bundle_with(&analysis, &config.models);
    bundle.write_to(&config.out_dir).map_err(Failure::output(&config.out_dir)).in_stage("report")?;

    let outputs: BTreeMap<&str, String> =
        bundle.files.iter().map(|(rel, content)| (rel.as_str(), sha256_hex(content.as_bytes()))).collect();
    let manifest = json!({
        "format": MANIFEST_FORMAT,
        "key": key,
        "inputs": inputs,
        "outputs": outputs,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&config.out_dir.join(MANIFEST), text.as_bytes()).in_stage("report")?;
    Ok(RunOutcome::Computed)
}
