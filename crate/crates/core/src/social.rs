//! Repeat authors within an editor's article set.
//!
//! For each editor, every (non-blacklisted) author key is tallied once per
//! article. Authors with two or more articles are repeat authors; an article
//! with at least one repeat author has R = 1.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{normalize_surname, AuthorKey, Corpus, EditorIdentity};
use crate::editor_metrics::EditorMetrics;

/// Normalized surnames excluded from repeat-author tallies regardless of
/// initial.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SurnameBlacklist {
    surnames: BTreeSet<String>,
}

impl SurnameBlacklist {
    /// Surnames of all degenerate editor keys.
    pub fn build(editors: &[EditorIdentity]) -> Self {
        Self {
            surnames: editors
                .iter()
                .filter(|e| e.degenerate)
                .map(|e| e.key.surname().to_string())
                .collect(),
        }
    }

    /// Parses one surname per line; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(input: R) -> io::Result<Self> {
        let mut surnames = BTreeSet::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let surname = normalize_surname(line);
            if !surname.is_empty() {
                surnames.insert(surname);
            }
        }
        Ok(Self { surnames })
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for s in &self.surnames {
            writeln!(out, "{s}")?;
        }
        Ok(())
    }

    pub fn from_surnames<I: IntoIterator<Item = S>, S: AsRef<str>>(surnames: I) -> Self {
        Self {
            surnames: surnames
                .into_iter()
                .map(|s| normalize_surname(s.as_ref()))
                .filter(|s| !s.is_empty())
                .collect(),
        }
    }

    pub fn contains(&self, key: &AuthorKey) -> bool {
        self.surnames.contains(key.surname())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.surnames.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.surnames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surnames.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditorTies {
    /// Index into the profile list.
    pub profile: usize,
    /// K2_E: authors with ≥ 2 articles in the editor's set.
    pub repeat_authors: usize,
    /// Articles with R = 1.
    pub repeat_articles: usize,
    /// ρ_E = repeat_articles / N_E.
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TieAnnotation {
    /// R_{A,E}, indexed by article.
    pub r: Vec<bool>,
    /// One entry per editor profile, in profile order.
    pub editors: Vec<EditorTies>,
    /// Corpus-wide histogram of A_{E,k}: articles per (editor, author) pair.
    pub author_counts: BTreeMap<u32, u64>,
}

impl TieAnnotation {
    pub fn repeat_share(&self) -> f64 {
        if self.r.is_empty() {
            return 0.0;
        }
        self.r.iter().filter(|&&r| r).count() as f64 / self.r.len() as f64
    }
}

pub fn tag_repeat_authors(
    corpus: &Corpus,
    metrics: &EditorMetrics,
    blacklist: &SurnameBlacklist,
) -> TieAnnotation {
    let articles = corpus.articles();
    let per_editor: Vec<(EditorTies, Vec<usize>, BTreeMap<u32, u64>)> = metrics
        .profiles
        .par_iter()
        .enumerate()
        .map(|(p, profile)| {
            let keys: Vec<Vec<AuthorKey>> = profile
                .articles
                .iter()
                .map(|&a| {
                    let distinct: HashSet<AuthorKey> = articles[a]
                        .authors
                        .iter()
                        .filter_map(|n| n.key())
                        .filter(|k| !blacklist.contains(k))
                        .collect();
                    distinct.into_iter().collect()
                })
                .collect();
            let mut tally: HashMap<&AuthorKey, u32> = HashMap::new();
            for article_keys in &keys {
                for k in article_keys {
                    *tally.entry(k).or_default() += 1;
                }
            }
            let mut histogram = BTreeMap::new();
            for &count in tally.values() {
                *histogram.entry(count).or_default() += 1;
            }
            let repeat_authors = tally.values().filter(|&&c| c >= 2).count();
            let flagged: Vec<usize> = profile
                .articles
                .iter()
                .zip(&keys)
                .filter(|(_, ks)| ks.iter().any(|k| tally[k] >= 2))
                .map(|(&a, _)| a)
                .collect();
            let ties = EditorTies {
                profile: p,
                repeat_authors,
                repeat_articles: flagged.len(),
                rho: flagged.len() as f64 / profile.n_articles as f64,
            };
            (ties, flagged, histogram)
        })
        .collect();

    let mut r = vec![false; corpus.len()];
    let mut editors = Vec::with_capacity(per_editor.len());
    let mut author_counts: BTreeMap<u32, u64> = BTreeMap::new();
    for (ties, flagged, histogram) in per_editor {
        for a in flagged {
            r[a] = true;
        }
        for (count, n) in histogram {
            *author_counts.entry(count).or_default() += n;
        }
        editors.push(ties);
    }
    TieAnnotation {
        r,
        editors,
        author_counts,
    }
}
