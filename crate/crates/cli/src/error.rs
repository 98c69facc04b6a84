use std::io;
use std::path::{Path, PathBuf};

use forensics_core::corpus::{CacheError, CorpusError, IngestError};
use forensics_core::econometrics::FitError;
use forensics_core::synth::SynthError;

use crate::config::ConfigError;

/// Process exit codes, one per failure class. Usage errors exit 2 (clap).
pub mod exit {
    pub const CONFIG: u8 = 3;
    pub const INPUT: u8 = 4;
    pub const EMPTY_CORPUS: u8 = 5;
    pub const CORRUPT_CACHE: u8 = 6;
    pub const STALE_ARTIFACT: u8 = 7;
    pub const FIT: u8 = 8;
    pub const SYNTH: u8 = 9;
    pub const OUTPUT: u8 = 10;
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("{path} is stale: it differs from the {artifact} recomputed from the corpus")]
    Stale { path: PathBuf, artifact: &'static str },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("invalid synth config: {0}")]
    SynthConfig(serde_json::Error),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("generated corpus is invalid: {0}")]
    SynthCorpus(#[from] CorpusError),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl Failure {
    pub fn input(path: &Path) -> impl FnOnce(io::Error) -> Self + '_ {
        move |source| Self::Input {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn output(path: &Path) -> impl FnOnce(io::Error) -> Self + '_ {
        move |source| Self::Output {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Usage(_) | Self::SynthConfig(_) => exit::CONFIG,
            Self::Input { .. } => exit::INPUT,
            Self::Ingest(IngestError::NoEditors { .. } | IngestError::NoArticles { .. }) => exit::EMPTY_CORPUS,
            Self::Ingest(_) => exit::INPUT,
            Self::Cache(CacheError::Io(_)) => exit::INPUT,
            Self::Cache(_) => exit::CORRUPT_CACHE,
            Self::Stale { .. } => exit::STALE_ARTIFACT,
            Self::Fit(_) => exit::FIT,
            Self::Synth(_) | Self::SynthCorpus(_) => exit::SYNTH,
            Self::Output { .. } => exit::OUTPUT,
        }
    }
}

/// A failure tagged with the pipeline stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {failure}")]
pub struct StageError {
    pub stage: &'static str,
    pub failure: Failure,
}

pub trait InStage<T> {
    fn in_stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T, E: Into<Failure>> InStage<T> for Result<T, E> {
    fn in_stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|e| StageError {
            stage,
            failure: e.into(),
        })
    }
}
