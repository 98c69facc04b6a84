//! `forensics`: editorial-forensics pipeline on journal corpora.
//!
//! Exit codes: 0 success, 2 usage, 3 configuration, 4 unreadable input,
//! 5 empty corpus, 6 corrupt corpus cache, 7 stale upstream artifact,
//! 8 model fit failure, 9 synthetic generation failure, 10 output error.
//! `FORENSICS_THREADS` caps the worker threads.

mod config;
mod error;
mod run;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Parser, Subcommand};
use forensics_core::econometrics::{ModelVariant, DEFAULT_MIN_ARTICLES};
use forensics_core::impact::ImpactOptions;
use forensics_core::renumeration::RenumerationOptions;

use config::PipelineConfig;
use error::{Failure, StageError};
use run::{run_pipeline, RunOutcome};
use stages::{AnalysisArgs, RenumerateOutputs};

#[derive(Debug, Parser)]
#[command(name = "forensics", version, about = "Editor power, bias and citation forensics for journal corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate articles.jsonl and editors.jsonl into a corpus cache.
    Ingest {
        #[arg(long)]
        articles: PathBuf,
        #[arg(long)]
        editors: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Latest admissible acceptance date (YYYY-MM-DD).
        #[arg(long)]
        census_date: Option<NaiveDate>,
        /// Writes every rejected line with its reason.
        #[arg(long)]
        diagnostics_out: Option<PathBuf>,
    },
    /// Keyword-weight classification: `doi, top_ranked, principal_class, refined_sa`.
    Classify {
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detrended citation impact: `doi, s, t, z, excluded_flag`.
    Normalize {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Classes table to check against the corpus.
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Editor profiles and distribution tables.
    Metrics {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Impact table to check against the corpus.
        #[arg(long)]
        impact: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Directory for the rank, Lorenz and distribution tables.
        #[arg(long)]
        dist_out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MIN_ARTICLES)]
        min_n: usize,
    },
    /// Repeat-author tags: `doi, editor_id, R`.
    Ties {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Profiles table to check against the corpus.
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        blacklist_out: Option<PathBuf>,
    },
    /// Editor-clustered fixed-effects regression.
    Regress {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// One of I, I-rtau, I-top10, II, II-fxr.
        #[arg(long)]
        model: ModelVariant,
        #[arg(long, default_value_t = DEFAULT_MIN_ARTICLES)]
        min_n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also writes the fit as a regression-table CSV.
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Conditional editor-citation rates, ΔC and their tests.
    Renumerate {
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long, default_value_t = RenumerationOptions::default().min_articles)]
        min_n: usize,
        #[arg(long, default_value_t = RenumerationOptions::default().trend_alpha)]
        trend_alpha: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tests_out: Option<PathBuf>,
        #[arg(long)]
        scatter_out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with ground truth.
    Synth {
        /// JSON synth config; omitted fields take their defaults.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the whole pipeline from a key = value config file.
    Report {
        #[arg(long)]
        config: PathBuf,
    },
    /// Headline statistics as `statistic,value` rows.
    Summary {
        /// Corpus cache to analyse.
        #[arg(long, required_unless_present = "report_dir", conflicts_with = "report_dir")]
        corpus: Option<PathBuf>,
        /// Report directory with a summary.json.
        #[arg(long)]
        report_dir: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MIN_ARTICLES)]
        min_n: usize,
        /// Output file; stdout by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), StageError> {
    let Ok(value) = std::env::var("FORENSICS_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| StageError {
        stage: "setup",
        failure: Failure::Usage(format!("FORENSICS_THREADS=`{value}` is not a positive integer")),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| StageError {
            stage: "setup",
            failure: Failure::Usage(format!("cannot start {threads} threads: {e}")),
        })
}

fn dispatch(command: Command) -> Result<(), StageError> {
    match command {
        Command::Ingest {
            articles,
            editors,
            out,
            census_date,
            diagnostics_out,
        } => stages::run_ingest(&articles, &editors, &out, census_date, diagnostics_out.as_deref()),
        Command::Classify { analysis, out } => stages::run_classify(&analysis, &out),
        Command::Normalize { analysis, classes, out } => stages::run_normalize(&analysis, classes.as_ref(), &out),
        Command::Metrics {
            analysis,
            impact,
            out,
            dist_out,
            min_n,
        } => stages::run_metrics(&analysis, impact.as_ref(), &out, dist_out.as_deref(), min_n),
        Command::Ties {
            analysis,
            profiles,
            out,
            blacklist_out,
        } => stages::run_ties(&analysis, profiles.as_ref(), &out, blacklist_out.as_deref()),
        Command::Regress {
            analysis,
            model,
            min_n,
            out,
            table_out,
        } => stages::run_regress(&analysis, model, min_n, &out, table_out.as_deref()),
        Command::Renumerate {
            analysis,
            min_n,
            trend_alpha,
            out,
            tests_out,
            scatter_out,
        } => stages::run_renumerate(
            &analysis,
            min_n,
            trend_alpha,
            RenumerateOutputs {
                out: &out,
                tests_out: tests_out.as_deref(),
                scatter_out: scatter_out.as_deref(),
            },
        ),
        Command::Synth { config, out_dir, seed } => stages::run_synth(&config, &out_dir, seed),
        Command::Report { config } => {
            let config = PipelineConfig::read(&config).map_err(|e| StageError {
                stage: "config",
                failure: e.into(),
            })?;
            match run_pipeline(&config)? {
                RunOutcome::Computed => eprintln!("report: written to {}", config.out_dir.display()),
                RunOutcome::UpToDate => eprintln!("report: {} is up to date", config.out_dir.display()),
            }
            Ok(())
        }
        Command::Summary {
            corpus,
            report_dir,
            min_n,
            out,
        } => {
            let defaults = ImpactOptions::default();
            let analysis = corpus.map(|corpus| AnalysisArgs {
                corpus,
                first_year: defaults.first_year,
                last_model_year: defaults.last_model_year,
                blacklist_override: None,
            });
            stages::run_summary(analysis.as_ref(), report_dir.as_deref(), min_n, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forensics: {e}");
            ExitCode::from(e.failure.exit_code())
        }
    }
}
