//! Keyword-based subject-area classification.
//!
//! Every keyword gets a weight vector over the ten top-level classes from
//! corpus-wide co-occurrence counts. An article's principal class is the
//! argmax of its summed keyword vectors, except that Biology is replaced by
//! the runner-up, and the principal class is finally merged into one of six
//! refined subject areas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ArticleRecord, Corpus, TopClass};

const N_CLASSES: usize = 10;

pub type WeightVector = [f64; N_CLASSES];

/// Canonical keyword form used as the table key: trimmed and lower-cased.
pub fn normalize_keyword(raw: &str) -> String {
    raw.trim().to_lowercase()
}

fn distinct_keywords(article: &ArticleRecord) -> BTreeSet<String> {
    article
        .keywords
        .iter()
        .map(|k| normalize_keyword(k))
        .filter(|k| !k.is_empty())
        .collect()
}

/// Keyword → class weight vector, each row summing to 1 (or all zero).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeywordWeightTable {
    rows: BTreeMap<String, WeightVector>,
}

impl KeywordWeightTable {
    pub fn build(corpus: &Corpus) -> Self {
        Self::from_articles(corpus.articles())
    }

    /// Counts, for each distinct keyword of each article, one co-occurrence
    /// with each distinct class of that article, then row-normalizes.
    pub fn from_articles(articles: &[ArticleRecord]) -> Self {
        let mut counts: BTreeMap<String, [u64; N_CLASSES]> = BTreeMap::new();
        for article in articles {
            let classes: BTreeSet<TopClass> = article.top_level_classes.iter().copied().collect();
            for keyword in distinct_keywords(article) {
                let row = counts.entry(keyword).or_insert([0; N_CLASSES]);
                for class in &classes {
                    row[class.position()] += 1;
                }
            }
        }
        let rows = counts
            .into_iter()
            .map(|(keyword, row)| {
                let total: u64 = row.iter().sum();
                let mut weights = [0.0; N_CLASSES];
                if total > 0 {
                    for (w, &c) in weights.iter_mut().zip(&row) {
                        *w = c as f64 / total as f64;
                    }
                }
                (keyword, weights)
            })
            .collect();
        Self { rows }
    }

    /// Weight vector for a keyword; all-zero when unseen.
    pub fn weights(&self, keyword: &str) -> WeightVector {
        self.rows
            .get(&normalize_keyword(keyword))
            .copied()
            .unwrap_or([0.0; N_CLASSES])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &WeightVector)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One of the six merged subject areas, `s` in 1..=6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub struct RefinedSubjectArea(u8);

impl RefinedSubjectArea {
    pub const COUNT: usize = 6;

    pub fn new(s: u8) -> Option<Self> {
        (1..=6).contains(&s).then_some(Self(s))
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (1..=6).map(Self)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Merge rule: (iv)+(v), (vi)+(vii), (viii)+(ix). Science policy has no
    /// refined area.
    pub fn from_principal(class: TopClass) -> Option<Self> {
        let s = match class.index() {
            1 => 1,
            2 => 2,
            3 => 3,
            4 | 5 => 4,
            6 | 7 => 5,
            8 | 9 => 6,
            _ => return None,
        };
        Some(Self(s))
    }

    pub fn label(self) -> &'static str {
        match self.0 {
            1 => "Biology and life sciences",
            2 => "Medicine and health sciences",
            3 => "Physical sciences",
            4 => "People and places / Social sciences",
            5 => "Engineering and technology / Computer and information sciences",
            _ => "Ecology and environmental sciences / Earth sciences",
        }
    }
}

impl From<RefinedSubjectArea> for u8 {
    fn from(s: RefinedSubjectArea) -> u8 {
        s.0
    }
}

impl TryFrom<u8> for RefinedSubjectArea {
    type Error = String;

    fn try_from(s: u8) -> Result<Self, Self::Error> {
        Self::new(s).ok_or_else(|| format!("refined subject area {s} outside 1..=6"))
    }
}

impl fmt::Display for RefinedSubjectArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Classification of one article at each stage of the rule chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    /// Argmax of the summed keyword weights; `None` if the sum is all zero.
    pub top_ranked: Option<TopClass>,
    /// After the Biology exception rule.
    pub principal: Option<TopClass>,
    /// After merging; `None` when unresolved (zero weight or Science policy).
    pub refined: Option<RefinedSubjectArea>,
}

impl Classification {
    pub const UNRESOLVED: Classification = Classification {
        top_ranked: None,
        principal: None,
        refined: None,
    };

    pub fn is_resolved(&self) -> bool {
        self.refined.is_some()
    }
}

/// Index of the largest entry, lowest index on ties; `None` if all ≤ 0.
fn argmax(v: &WeightVector, skip: Option<usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &w) in v.iter().enumerate() {
        if Some(i) == skip || w <= 0.0 {
            continue;
        }
        if best.is_none_or(|b| w > v[b]) {
            best = Some(i);
        }
    }
    best
}

/// Applies argmax, exception and merge rules to a summed weight vector.
pub fn classify_weights(total: &WeightVector) -> Classification {
    let Some(top) = argmax(total, None) else {
        return Classification::UNRESOLVED;
    };
    let biology = TopClass::BiologyLifeSciences.position();
    let principal = if top == biology {
        // A zero runner-up keeps Biology rather than inventing a class.
        argmax(total, Some(biology)).unwrap_or(biology)
    } else {
        top
    };
    let principal = TopClass::ALL[principal];
    Classification {
        top_ranked: Some(TopClass::ALL[top]),
        principal: Some(principal),
        refined: RefinedSubjectArea::from_principal(principal),
    }
}

pub fn keyword_sum(article: &ArticleRecord, table: &KeywordWeightTable) -> WeightVector {
    let mut total = [0.0; N_CLASSES];
    for keyword in distinct_keywords(article) {
        if let Some(row) = table.rows.get(&keyword) {
            for (t, w) in total.iter_mut().zip(row) {
                *t += w;
            }
        }
    }
    total
}

pub fn classify(article: &ArticleRecord, table: &KeywordWeightTable) -> Classification {
    classify_weights(&keyword_sum(article, table))
}

/// Classifies every article of the corpus, in corpus order.
pub fn classify_corpus(corpus: &Corpus, table: &KeywordWeightTable) -> Vec<Classification> {
    corpus
        .articles()
        .par_iter()
        .map(|a| classify(a, table))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramStage {
    PreException,
    PostException,
    Refined,
}

/// Article counts per class at one stage. `unresolved` holds the articles
/// without a class at that stage, so `total() + unresolved` is always the
/// number of classified articles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaHistogram {
    pub stage: HistogramStage,
    /// 10 buckets for the top-level stages, 6 for the refined stage.
    pub counts: Vec<u64>,
    pub unresolved: u64,
}

impl SaHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn labels(&self) -> Vec<&'static str> {
        match self.stage {
            HistogramStage::Refined => RefinedSubjectArea::all().map(|s| s.label()).collect(),
            _ => TopClass::ALL.iter().map(|c| c.label()).collect(),
        }
    }
}

pub fn sa_histogram(classes: &[Classification], stage: HistogramStage) -> SaHistogram {
    let buckets = match stage {
        HistogramStage::Refined => RefinedSubjectArea::COUNT,
        _ => N_CLASSES,
    };
    let mut counts = vec![0; buckets];
    let mut unresolved = 0;
    for c in classes {
        let bucket = match stage {
            HistogramStage::PreException => c.top_ranked.map(TopClass::position),
            HistogramStage::PostException => c.principal.map(TopClass::position),
            HistogramStage::Refined => c.refined.map(|s| usize::from(s.index()) - 1),
        };
        match bucket {
            Some(b) => counts[b] += 1,
            None => unresolved += 1,
        }
    }
    SaHistogram {
        stage,
        counts,
        unresolved,
    }
}
