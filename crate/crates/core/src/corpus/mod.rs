//! Canonical corpus data model.
//!
//! Every downstream module consumes only the types defined here. A
//! [`Corpus`] is immutable once built: articles are validated against their
//! invariants and each article's editor is resolved to exactly one
//! [`EditorIdentity`].

mod cache;
mod ingest;
mod names;

use std::collections::HashMap;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use cache::{read_cache, write_cache, CacheError, CACHE_FORMAT_VERSION};
pub use ingest::{
    ingest, ingest_readers, write_articles_jsonl, write_editors_jsonl, Diagnostic, IngestError,
    IngestOptions, Ingested, InputFile,
};
pub use names::{normalize_surname, AuthorKey, AuthorName, Initial};

/// Census date of the reference citation download (2016-12-03).
pub fn default_census_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 12, 3).expect("valid date")
}

/// One of the ten top-level journal classifications, in frequency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum TopClass {
    BiologyLifeSciences,
    MedicineHealthSciences,
    PhysicalSciences,
    PeoplePlaces,
    SocialSciences,
    EngineeringTechnology,
    ComputerInformationSciences,
    EcologyEnvironmentalSciences,
    EarthSciences,
    SciencePolicy,
}

impl TopClass {
    pub const ALL: [TopClass; 10] = [
        TopClass::BiologyLifeSciences,
        TopClass::MedicineHealthSciences,
        TopClass::PhysicalSciences,
        TopClass::PeoplePlaces,
        TopClass::SocialSciences,
        TopClass::EngineeringTechnology,
        TopClass::ComputerInformationSciences,
        TopClass::EcologyEnvironmentalSciences,
        TopClass::EarthSciences,
        TopClass::SciencePolicy,
    ];

    /// 1-based index (i) = 1 ... (x) = 10.
    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    /// 0-based position, convenient for weight vectors.
    pub fn position(self) -> usize {
        self as usize
    }

    pub fn from_index(index: u8) -> Option<Self> {
        Self::ALL.get(usize::from(index).checked_sub(1)?).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            TopClass::BiologyLifeSciences => "Biology and life sciences",
            TopClass::MedicineHealthSciences => "Medicine and health sciences",
            TopClass::PhysicalSciences => "Physical sciences",
            TopClass::PeoplePlaces => "People and places",
            TopClass::SocialSciences => "Social sciences",
            TopClass::EngineeringTechnology => "Engineering and technology",
            TopClass::ComputerInformationSciences => "Computer and information sciences",
            TopClass::EcologyEnvironmentalSciences => "Ecology and environmental sciences",
            TopClass::EarthSciences => "Earth sciences",
            TopClass::SciencePolicy => "Science policy",
        }
    }
}

impl From<TopClass> for u8 {
    fn from(class: TopClass) -> u8 {
        class.index()
    }
}

impl TryFrom<u8> for TopClass {
    type Error = String;

    fn try_from(index: u8) -> Result<Self, Self::Error> {
        TopClass::from_index(index).ok_or_else(|| format!("class index {index} outside 1..=10"))
    }
}

impl fmt::Display for TopClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One entry of an article's reference list. May be empty when the
/// reference could not be parsed; such entries still count toward the
/// reference total but never match an editor.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferenceEntry {
    pub authors: Vec<AuthorName>,
}

impl ReferenceEntry {
    pub fn cites(&self, key: &AuthorKey) -> bool {
        self.authors.iter().any(|a| a.matches(key))
    }
}

/// One publication. Field order is the serialized JSONL field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub doi: String,
    pub editor_id: String,
    pub received: NaiveDate,
    pub accepted: NaiveDate,
    pub year: i32,
    pub authors: Vec<AuthorName>,
    pub keywords: Vec<String>,
    pub top_level_classes: Vec<TopClass>,
    pub references: Vec<ReferenceEntry>,
    pub citation_count: u64,
}

impl ArticleRecord {
    /// Acceptance time Δ_A in days.
    pub fn duration_days(&self) -> i64 {
        article_duration(self)
    }

    pub fn team_size(&self) -> usize {
        self.authors.len()
    }
}

/// Days between submission and acceptance (exact calendar difference).
pub fn article_duration(article: &ArticleRecord) -> i64 {
    (article.accepted - article.received).num_days()
}

/// A journal editor. `degenerate` is set when the abbreviated name is shared
/// by two or more editors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditorIdentity {
    pub editor_id: String,
    pub name: AuthorName,
    pub key: AuthorKey,
    pub degenerate: bool,
}

impl EditorIdentity {
    /// Returns `None` if the surname normalizes to nothing.
    pub fn new(editor_id: impl Into<String>, name: AuthorName) -> Option<Self> {
        let key = name.key()?;
        Some(Self {
            editor_id: editor_id.into(),
            name,
            key,
            degenerate: false,
        })
    }
}

/// Flags every editor whose (surname, initial) key occurs at least twice.
pub fn mark_degenerate_editors(editors: &mut [EditorIdentity]) {
    let mut counts: HashMap<&AuthorKey, usize> = HashMap::new();
    for editor in editors.iter() {
        *counts.entry(&editor.key).or_default() += 1;
    }
    let degenerate: Vec<bool> = editors.iter().map(|e| counts[&e.key] >= 2).collect();
    for (editor, flag) in editors.iter_mut().zip(degenerate) {
        editor.degenerate = flag;
    }
}

/// Errors raised when assembling a [`Corpus`] from already-parsed records.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CorpusError {
    #[error("article {doi}: editor `{editor_id}` is not in the editor list")]
    DanglingEditor { doi: String, editor_id: String },
    #[error("duplicate editor id `{0}`")]
    DuplicateEditor(String),
    #[error("article {doi}: {message}")]
    InvalidArticle { doi: String, message: String },
}

/// Checks the per-article invariants, independent of the editor list.
pub fn validate_article(article: &ArticleRecord, census_date: NaiveDate) -> Result<(), String> {
    if article.accepted < article.received {
        return Err(format!(
            "accepted {} precedes received {}",
            article.accepted, article.received
        ));
    }
    if article.accepted > census_date {
        return Err(format!(
            "accepted {} is after the census date {census_date}",
            article.accepted
        ));
    }
    if article.authors.is_empty() {
        return Err("article has no authors".into());
    }
    if let Some(i) = article.authors.iter().position(|a| a.key().is_none()) {
        return Err(format!("authors[{i}] has an empty surname"));
    }
    Ok(())
}

/// A validated, immutable corpus.
#[derive(Debug, Clone)]
pub struct Corpus {
    articles: Vec<ArticleRecord>,
    editors: Vec<EditorIdentity>,
    census_date: NaiveDate,
    article_editor: Vec<usize>,
}

impl Corpus {
    /// Validates all invariants and recomputes degenerate flags.
    pub fn new(
        articles: Vec<ArticleRecord>,
        mut editors: Vec<EditorIdentity>,
        census_date: NaiveDate,
    ) -> Result<Self, CorpusError> {
        let mut index: HashMap<&str, usize> = HashMap::with_capacity(editors.len());
        for (i, editor) in editors.iter().enumerate() {
            if index.insert(editor.editor_id.as_str(), i).is_some() {
                return Err(CorpusError::DuplicateEditor(editor.editor_id.clone()));
            }
        }
        let mut article_editor = Vec::with_capacity(articles.len());
        for article in &articles {
            validate_article(article, census_date).map_err(|message| {
                CorpusError::InvalidArticle {
                    doi: article.doi.clone(),
                    message,
                }
            })?;
            let e = *index.get(article.editor_id.as_str()).ok_or_else(|| {
                CorpusError::DanglingEditor {
                    doi: article.doi.clone(),
                    editor_id: article.editor_id.clone(),
                }
            })?;
            article_editor.push(e);
        }
        drop(index);
        mark_degenerate_editors(&mut editors);
        Ok(Self {
            articles,
            editors,
            census_date,
            article_editor,
        })
    }

    pub fn articles(&self) -> &[ArticleRecord] {
        &self.articles
    }

    pub fn editors(&self) -> &[EditorIdentity] {
        &self.editors
    }

    pub fn census_date(&self) -> NaiveDate {
        self.census_date
    }

    /// Index into [`Corpus::editors`] of the editor of article `article`.
    pub fn editor_of(&self, article: usize) -> usize {
        self.article_editor[article]
    }

    /// Article indices per editor, in corpus order.
    pub fn articles_by_editor(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.editors.len()];
        for (a, &e) in self.article_editor.iter().enumerate() {
            groups[e].push(a);
        }
        groups
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    pub fn article(doi: &str, editor: &str, received: &str, accepted: &str) -> ArticleRecord {
        ArticleRecord {
            doi: doi.into(),
            editor_id: editor.into(),
            received: date(received),
            accepted: date(accepted),
            year: date(accepted).format("%Y").to_string().parse().unwrap(),
            authors: vec![AuthorName::new("Doe", "J")],
            keywords: vec![],
            top_level_classes: vec![],
            references: vec![],
            citation_count: 0,
        }
    }

    pub fn editor(id: &str, surname: &str, initial: &str) -> EditorIdentity {
        EditorIdentity::new(id, AuthorName::new(surname, initial)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn duration_examples() {
        assert_eq!(article_duration(&article("a", "e", "2010-01-01", "2010-01-01")), 0);
        assert_eq!(article_duration(&article("a", "e", "2010-01-01", "2010-05-11")), 130);
        let received = date("2008-03-01");
        let accepted = received + chrono::Duration::days(1927);
        let mut a = article("a", "e", "2008-03-01", "2008-03-01");
        a.accepted = accepted;
        assert_eq!(article_duration(&a), 1927);
    }

    #[test]
    fn top_class_indices_round_trip() {
        for (i, c) in TopClass::ALL.iter().enumerate() {
            assert_eq!(usize::from(c.index()), i + 1);
            assert_eq!(TopClass::from_index(c.index()), Some(*c));
        }
        assert_eq!(TopClass::from_index(0), None);
        assert_eq!(TopClass::from_index(11), None);
    }

    #[test]
    fn singh_collision_is_degenerate() {
        let mut editors = vec![
            editor("e1", "Singh", "Shree"),
            editor("e2", "Singh", "Seema"),
            editor("e3", "Uversky", "Vladimir"),
        ];
        mark_degenerate_editors(&mut editors);
        assert!(editors[0].degenerate && editors[1].degenerate);
        assert!(!editors[2].degenerate);
    }

    #[test]
    fn single_editor_not_degenerate() {
        let mut editors = vec![editor("e1", "Perc", "M")];
        mark_degenerate_editors(&mut editors);
        assert!(!editors[0].degenerate);
    }

    #[test]
    fn corpus_rejects_dangling_editor() {
        let err = Corpus::new(
            vec![article("a", "missing", "2010-01-01", "2010-02-01")],
            vec![editor("e1", "Perc", "M")],
            default_census_date(),
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::DanglingEditor { .. }));
    }

    #[test]
    fn per_editor_counts_sum_to_total() {
        let corpus = Corpus::new(
            vec![
                article("a", "e1", "2010-01-01", "2010-02-01"),
                article("b", "e2", "2010-01-01", "2010-02-01"),
                article("c", "e1", "2010-01-01", "2010-03-01"),
            ],
            vec![editor("e1", "Perc", "M"), editor("e2", "Uversky", "V")],
            default_census_date(),
        )
        .unwrap();
        let groups = corpus.articles_by_editor();
        assert_eq!(groups.iter().map(Vec::len).sum::<usize>(), corpus.len());
        assert_eq!(groups[0], vec![0, 2]);
    }
}
