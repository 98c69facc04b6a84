//! Stage subcommands.
//!
//! Every stage after `ingest` reads `corpus.bin` and recomputes the stages
//! it depends on in memory. Upstream artifacts passed on the command line
//! are not trusted as inputs: they are re-rendered from the corpus and must
//! match byte for byte, otherwise the stage fails as stale.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use forensics_core::corpus::{default_census_date, ingest, read_cache, write_cache, Corpus, IngestOptions};
use forensics_core::econometrics::{ModelVariant, DEFAULT_MIN_ARTICLES};
use forensics_core::impact::ImpactOptions;
use forensics_core::pipeline::{Analysis, PipelineOptions};
use forensics_core::renumeration::RenumerationOptions;
use forensics_core::report::{
    blacklist_txt, classes_csv, fit_all, fit_table_csv, impact_csv, metric_figure_files, profiles_csv,
    renumeration_csv, scatter_csv, summarize, tests_json, ties_csv, to_fixed_json, FitReport,
};
use forensics_core::social::SurnameBlacklist;
use forensics_core::synth::{generate, write_outputs, SynthConfig};
use serde_json::Value;

use crate::error::{Failure, InStage, StageError};

/// Settings shared by the stages that run the analysis.
#[derive(Debug, Clone, clap::Args)]
pub struct AnalysisArgs {
    /// Corpus cache written by `forensics ingest`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Earlier articles are pooled into this year.
    #[arg(long, default_value_t = 2007)]
    pub first_year: i32,
    /// Later articles stay out of the impact model and trend fits.
    #[arg(long, default_value_t = 2014)]
    pub last_model_year: i32,
    /// Surname list replacing the blacklist derived from degenerate editors.
    #[arg(long)]
    pub blacklist_override: Option<PathBuf>,
}

pub fn write_file(path: &Path, content: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(Failure::output(parent))?;
    }
    std::fs::write(path, content).map_err(Failure::output(path))
}

pub fn load_corpus(path: &Path) -> Result<Corpus, Failure> {
    let file = File::open(path).map_err(Failure::input(path))?;
    Ok(read_cache(BufReader::new(file))?)
}

pub fn read_blacklist(path: &Path) -> Result<SurnameBlacklist, Failure> {
    let file = File::open(path).map_err(Failure::input(path))?;
    SurnameBlacklist::read(BufReader::new(file)).map_err(Failure::input(path))
}

/// Fails unless the file at `path` equals `expected`.
fn check_fresh(path: Option<&PathBuf>, artifact: &'static str, expected: impl FnOnce() -> String) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let found = std::fs::read(path).map_err(Failure::input(path))?;
    if found != expected().as_bytes() {
        return Err(Failure::Stale {
            path: path.clone(),
            artifact,
        });
    }
    Ok(())
}

fn analysis(args: &AnalysisArgs, min_articles: usize, renumeration: RenumerationOptions) -> Result<Analysis, StageError> {
    let corpus = load_corpus(&args.corpus).in_stage("load")?;
    if args.last_model_year < args.first_year {
        return Err(StageError {
            stage: "load",
            failure: Failure::Usage(format!(
                "--last-model-year {} precedes --first-year {}",
                args.last_model_year, args.first_year
            )),
        });
    }
    let blacklist_override = args.blacklist_override.as_deref().map(read_blacklist).transpose().in_stage("ties")?;
    let options = PipelineOptions {
        min_articles,
        impact: ImpactOptions {
            first_year: args.first_year,
            last_model_year: args.last_model_year,
        },
        renumeration: RenumerationOptions {
            last_model_year: args.last_model_year,
            ..renumeration
        },
        blacklist_override,
    };
    Ok(Analysis::run(corpus, options))
}

pub fn run_ingest(
    articles: &Path,
    editors: &Path,
    out: &Path,
    census_date: Option<NaiveDate>,
    diagnostics_out: Option<&Path>,
) -> Result<(), StageError> {
    let options = IngestOptions {
        census_date: census_date.unwrap_or_else(default_census_date),
    };
    let ingested = ingest(articles, editors, &options).in_stage("ingest")?;
    let corpus = &ingested.corpus;
    eprintln!(
        "ingest: {} articles, {} editors, {} lines rejected",
        corpus.len(),
        corpus.editors().len(),
        ingested.diagnostics.len()
    );
    for d in ingested.diagnostics.iter().take(20) {
        eprintln!("  {d}");
    }
    if let Some(path) = diagnostics_out {
        let text: String = ingested.diagnostics.iter().map(|d| format!("{d}\n")).collect();
        write_file(path, text.as_bytes()).in_stage("ingest")?;
    }
    write_corpus(corpus, out).in_stage("ingest")
}

pub fn write_corpus(corpus: &Corpus, out: &Path) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_cache(corpus, &mut buf).map_err(|e| match e {
        forensics_core::corpus::CacheError::Io(source) => Failure::Output {
            path: out.to_path_buf(),
            source,
        },
        other => Failure::Cache(other),
    })?;
    write_file(out, &buf)
}

pub fn run_classify(args: &AnalysisArgs, out: &Path) -> Result<(), StageError> {
    let a = analysis(args, DEFAULT_MIN_ARTICLES, RenumerationOptions::default())?;
    write_file(out, classes_csv(&a).as_bytes()).in_stage("classify")
}

pub fn run_normalize(args: &AnalysisArgs, classes: Option<&PathBuf>, out: &Path) -> Result<(), StageError> {
    let a = analysis(args, DEFAULT_MIN_ARTICLES, RenumerationOptions::default())?;
    check_fresh(classes, "classes table", || classes_csv(&a)).in_stage("normalize")?;
    write_file(out, impact_csv(&a).as_bytes()).in_stage("normalize")
}

pub fn run_metrics(
    args: &AnalysisArgs,
    impact: Option<&PathBuf>,
    out: &Path,
    dist_out: Option<&Path>,
    min_n: usize,
) -> Result<(), StageError> {
    let a = analysis(args, min_n, RenumerationOptions::default())?;
    check_fresh(impact, "impact table", || impact_csv(&a)).in_stage("metrics")?;
    write_file(out, profiles_csv(&a).as_bytes()).in_stage("metrics")?;
    if let Some(dir) = dist_out {
        for (name, content) in metric_figure_files(&a) {
            write_file(&dir.join(name), content.as_bytes()).in_stage("metrics")?;
        }
    }
    Ok(())
}

pub fn run_ties(
    args: &AnalysisArgs,
    profiles: Option<&PathBuf>,
    out: &Path,
    blacklist_out: Option<&Path>,
) -> Result<(), StageError> {
    let a = analysis(args, DEFAULT_MIN_ARTICLES, RenumerationOptions::default())?;
    check_fresh(profiles, "editor profiles", || profiles_csv(&a)).in_stage("ties")?;
    write_file(out, ties_csv(&a).as_bytes()).in_stage("ties")?;
    if let Some(path) = blacklist_out {
        write_file(path, blacklist_txt(&a.blacklist).as_bytes()).in_stage("ties")?;
    }
    Ok(())
}

pub fn run_regress(
    args: &AnalysisArgs,
    model: ModelVariant,
    min_n: usize,
    out: &Path,
    table_out: Option<&Path>,
) -> Result<(), StageError> {
    let a = analysis(args, min_n, RenumerationOptions::default())?;
    let fit = a.fit(model).in_stage("regress")?;
    let report = FitReport::new(model, fit);
    write_file(out, to_fixed_json(&report).as_bytes()).in_stage("regress")?;
    if let Some(path) = table_out {
        let fits = [(model, Ok(report))].into_iter().collect();
        write_file(path, fit_table_csv(&fits, &[model]).as_bytes()).in_stage("regress")?;
    }
    Ok(())
}

pub struct RenumerateOutputs<'a> {
    pub out: &'a Path,
    pub tests_out: Option<&'a Path>,
    pub scatter_out: Option<&'a Path>,
}

pub fn run_renumerate(
    args: &AnalysisArgs,
    min_n: usize,
    trend_alpha: f64,
    outputs: RenumerateOutputs<'_>,
) -> Result<(), StageError> {
    if !(trend_alpha > 0.0 && trend_alpha < 1.0) {
        return Err(StageError {
            stage: "renumerate",
            failure: Failure::Usage(format!("--trend-alpha {trend_alpha} is not in (0, 1)")),
        });
    }
    let options = RenumerationOptions {
        min_articles: min_n,
        trend_alpha,
        ..RenumerationOptions::default()
    };
    let a = analysis(args, DEFAULT_MIN_ARTICLES, options)?;
    let records = a.renumeration();
    write_file(outputs.out, renumeration_csv(&records).as_bytes()).in_stage("renumerate")?;
    if let Some(path) = outputs.tests_out {
        write_file(path, tests_json(&records).as_bytes()).in_stage("renumerate")?;
    }
    if let Some(path) = outputs.scatter_out {
        write_file(path, scatter_csv(&records).as_bytes()).in_stage("renumerate")?;
    }
    Ok(())
}

pub fn read_synth_config(path: &Path, seed: Option<u64>) -> Result<SynthConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(Failure::input(path))?;
    let mut config: SynthConfig = serde_json::from_str(&text).map_err(Failure::SynthConfig)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

pub fn run_synth(config: &Path, out_dir: &Path, seed: Option<u64>) -> Result<(), StageError> {
    let config = read_synth_config(config, seed).in_stage("synth")?;
    let corpus = generate(&config).in_stage("synth")?;
    write_outputs(&corpus, out_dir).map_err(Failure::output(out_dir)).in_stage("synth")?;
    eprintln!(
        "synth: {} articles, {} editors written to {}",
        corpus.truth.n_articles,
        corpus.editors.len(),
        out_dir.display()
    );
    Ok(())
}

/// Headline statistics as `statistic,value` rows.
pub fn headline_csv(summary: &Value) -> String {
    let rows: [(&str, &str); 10] = [
        ("articles", "corpus/articles"),
        ("editors", "corpus/editors"),
        ("gini", "power/gini"),
        ("top10_articles", "power/top10_articles"),
        ("top10_share", "power/top10_share"),
        ("mean_duration_days", "activity/mean_duration"),
        ("share_f_zero", "citations/share_f_zero"),
        ("share_repeat", "ties/share_repeat"),
        ("mean_f0", "renumeration/mean_f0"),
        ("mean_f1", "renumeration/mean_f1"),
    ];
    let mut out = String::from("statistic,value\n");
    for (name, path) in rows {
        let value = path.split('/').try_fold(summary, |v, k| v.get(k));
        let cell = match value {
            Some(Value::Number(n)) => n.to_string(),
            _ => "NA".to_string(),
        };
        out.push_str(&format!("{name},{cell}\n"));
    }
    out
}

pub fn run_summary(
    args: Option<&AnalysisArgs>,
    report_dir: Option<&Path>,
    min_n: usize,
    out: Option<&Path>,
) -> Result<(), StageError> {
    let json = match (args, report_dir) {
        (_, Some(dir)) => {
            let path = dir.join("summary.json");
            std::fs::read_to_string(&path).map_err(Failure::input(&path)).in_stage("summary")?
        }
        (Some(args), None) => {
            let a = analysis(args, min_n, RenumerationOptions::default())?;
            let fits = fit_all(&a, &ModelVariant::ALL);
            to_fixed_json(&summarize(&a, &fits, &a.renumeration()))
        }
        (None, None) => unreachable!("clap requires a corpus or a report directory"),
    };
    let summary: Value = serde_json::from_str(&json)
        .map_err(|e| Failure::Usage(format!("summary.json is not valid JSON: {e}")))
        .in_stage("summary")?;
    let table = headline_csv(&summary);
    match out {
        Some(path) => write_file(path, table.as_bytes()).in_stage("summary"),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(table.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(Failure::output(Path::new("<stdout>")))
                .in_stage("summary")
        }
    }
}
