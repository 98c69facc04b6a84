//! Versioned on-disk corpus cache (`corpus.bin`).
//!
//! Layout: one ASCII header line `forensics-corpus v<N>` followed by a single
//! JSON document `{"census_date": .., "editors": [..], "articles": [..]}`.
//! Editors carry only their raw name; degenerate flags are recomputed on load.

use std::io::{self, BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{ArticleRecord, AuthorName, Corpus, CorpusError, EditorIdentity};

pub const CACHE_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "forensics-corpus";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a corpus cache (header `{0}`)")]
    BadHeader(String),
    #[error("corpus cache version {found} is not supported (expected {CACHE_FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("corrupt corpus cache: {0}")]
    Json(#[from] serde_json::Error),
    #[error("corrupt corpus cache: {0}")]
    Invalid(#[from] CorpusError),
    #[error("corrupt corpus cache: editor `{0}` has an empty surname")]
    EmptyEditor(String),
}

#[derive(Serialize, Deserialize)]
struct CachedEditor {
    editor_id: String,
    #[serde(flatten)]
    name: AuthorName,
}

#[derive(Serialize)]
struct CacheOut<'a> {
    census_date: NaiveDate,
    editors: Vec<CachedEditor>,
    articles: &'a [ArticleRecord],
}

#[derive(Deserialize)]
struct CacheIn {
    census_date: NaiveDate,
    editors: Vec<CachedEditor>,
    articles: Vec<ArticleRecord>,
}

pub fn write_cache<W: Write>(corpus: &Corpus, mut out: W) -> Result<(), CacheError> {
    writeln!(out, "{MAGIC} v{CACHE_FORMAT_VERSION}")?;
    let doc = CacheOut {
        census_date: corpus.census_date(),
        editors: corpus
            .editors()
            .iter()
            .map(|e| CachedEditor {
                editor_id: e.editor_id.clone(),
                name: e.name.clone(),
            })
            .collect(),
        articles: corpus.articles(),
    };
    serde_json::to_writer(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_cache<R: BufRead>(mut input: R) -> Result<Corpus, CacheError> {
    let mut header = String::new();
    input.read_line(&mut header)?;
    let header = header.trim_end();
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(" v"))
        .ok_or_else(|| CacheError::BadHeader(header.to_string()))?;
    let found: u32 = version
        .parse()
        .map_err(|_| CacheError::BadHeader(header.to_string()))?;
    if found != CACHE_FORMAT_VERSION {
        return Err(CacheError::Version { found });
    }
    let doc: CacheIn = serde_json::from_reader(input)?;
    let editors = doc
        .editors
        .into_iter()
        .map(|e| {
            let id = e.editor_id.clone();
            EditorIdentity::new(e.editor_id, e.name).ok_or(CacheError::EmptyEditor(id))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Corpus::new(doc.articles, editors, doc.census_date)?)
}
