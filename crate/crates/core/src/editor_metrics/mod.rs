//! Per-editor power, activity and citation measures.
//!
//! For editor E with article set A(E): N_E articles, service period L_E
//! (days between first and last acceptance), turnover d_E = L_E / N_E, mean
//! acceptance time Δ_E and its coefficient of variation, and for each
//! article the service age τ and the editor-citation count C_A / rate f_A.

mod distributions;
mod inequality;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{ArticleRecord, Corpus, EditorIdentity};
use crate::stats::{mean, sample_sd};

pub use distributions::{
    histogram,
    distribution_tables, Bin, DistributionPanel, DistributionTables, DEFAULT_BINS,
};
pub use inequality::{gini_pairwise, lorenz_gini, InequalityError, InequalitySummary};

pub const DAYS_PER_YEAR: f64 = 365.25;

/// Number of editors flagged as the most active.
pub const TOP_K: usize = 10;

/// Per-article quantities that depend on the article's editor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArticleMetrics {
    /// Days since the editor's first acceptance.
    pub tau_days: i64,
    /// τ in years of 365.25 days.
    pub tau: f64,
    /// Reference-list length.
    pub references: u64,
    /// References citing the editor (C_A).
    pub editor_citations: u64,
    /// C_A / references, 0 for an empty reference list.
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditorProfile {
    /// Index into the corpus editor list.
    pub editor: usize,
    pub editor_id: String,
    /// Article indices in corpus order.
    pub articles: Vec<usize>,
    pub n_articles: usize,
    /// L_E in days.
    pub service_days: i64,
    /// d_E = L_E / N_E.
    pub turnover_days: f64,
    /// Δ_E, mean acceptance time in days.
    pub mean_duration: f64,
    /// σ[Δ_A] / Δ_E with the sample sd; `None` below two articles or Δ_E = 0.
    pub cov_duration: Option<f64>,
    /// C_E.
    pub editor_citations: u64,
    /// T_E.
    pub total_references: u64,
    /// f_E = C_E / T_E (0 when T_E = 0).
    pub f: f64,
    pub degenerate: bool,
    /// T₁₀: among the ten editors with most articles.
    pub top10: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditorMetrics {
    /// One profile per editor with at least one article, in editor-list order.
    pub profiles: Vec<EditorProfile>,
    /// Indexed by article.
    pub articles: Vec<ArticleMetrics>,
}

impl EditorMetrics {
    /// Profile index of each corpus editor, `None` for editors without articles.
    pub fn profile_of_editor(&self, n_editors: usize) -> Vec<Option<usize>> {
        let mut index = vec![None; n_editors];
        for (p, profile) in self.profiles.iter().enumerate() {
            index[profile.editor] = Some(p);
        }
        index
    }
}

/// (C_A, f_A) for one article. Degenerate editors always get C_A = 0.
pub fn editor_citation_rate(article: &ArticleRecord, editor: &EditorIdentity) -> (u64, f64) {
    let total = article.references.len() as u64;
    if editor.degenerate || total == 0 {
        return (0, 0.0);
    }
    let citing = article
        .references
        .iter()
        .filter(|r| r.cites(&editor.key))
        .count() as u64;
    (citing, citing as f64 / total as f64)
}

pub fn build_profiles(corpus: &Corpus) -> EditorMetrics {
    let groups = corpus.articles_by_editor();
    let articles = corpus.articles();
    let editors = corpus.editors();

    let per_editor: Vec<(EditorProfile, Vec<(usize, ArticleMetrics)>)> = groups
        .into_par_iter()
        .enumerate()
        .filter(|(_, members)| !members.is_empty())
        .map(|(e, members)| {
            let editor = &editors[e];
            let first = members.iter().map(|&a| articles[a].accepted).min().expect("non-empty");
            let last = members.iter().map(|&a| articles[a].accepted).max().expect("non-empty");
            let durations: Vec<f64> = members
                .iter()
                .map(|&a| articles[a].duration_days() as f64)
                .collect();
            let mean_duration = mean(&durations).expect("non-empty");
            let cov_duration = sample_sd(&durations)
                .filter(|_| mean_duration > 0.0)
                .map(|sd| sd / mean_duration);

            let mut c_e = 0;
            let mut t_e = 0;
            let rows: Vec<(usize, ArticleMetrics)> = members
                .iter()
                .map(|&a| {
                    let article = &articles[a];
                    let (citing, f) = editor_citation_rate(article, editor);
                    let references = article.references.len() as u64;
                    c_e += citing;
                    t_e += references;
                    let tau_days = (article.accepted - first).num_days();
                    (
                        a,
                        ArticleMetrics {
                            tau_days,
                            tau: tau_days as f64 / DAYS_PER_YEAR,
                            references,
                            editor_citations: citing,
                            f,
                        },
                    )
                })
                .collect();

            let n = members.len();
            let service_days = (last - first).num_days();
            let profile = EditorProfile {
                editor: e,
                editor_id: editor.editor_id.clone(),
                n_articles: n,
                service_days,
                turnover_days: service_days as f64 / n as f64,
                mean_duration,
                cov_duration,
                editor_citations: c_e,
                total_references: t_e,
                f: if t_e == 0 { 0.0 } else { c_e as f64 / t_e as f64 },
                degenerate: editor.degenerate,
                top10: false,
                articles: members,
            };
            (profile, rows)
        })
        .collect();

    let mut article_metrics = vec![
        ArticleMetrics {
            tau_days: 0,
            tau: 0.0,
            references: 0,
            editor_citations: 0,
            f: 0.0,
        };
        corpus.len()
    ];
    let mut profiles = Vec::with_capacity(per_editor.len());
    for (profile, rows) in per_editor {
        for (a, m) in rows {
            article_metrics[a] = m;
        }
        profiles.push(profile);
    }
    for row in rank_table(&profiles, TOP_K) {
        profiles[row.profile].top10 = true;
    }
    EditorMetrics {
        profiles,
        articles: article_metrics,
    }
}

/// Upper edges (days) of the Δ_E bands used to annotate rank tables.
pub const DURATION_BAND_EDGES: [f64; 4] = [90.0, 120.0, 150.0, 180.0];

pub fn duration_band(mean_duration: f64) -> &'static str {
    const LABELS: [&str; 5] = ["<90", "90-120", "120-150", "150-180", ">=180"];
    let i = DURATION_BAND_EDGES
        .iter()
        .position(|&edge| mean_duration < edge)
        .unwrap_or(DURATION_BAND_EDGES.len());
    LABELS[i]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankRow {
    pub rank: usize,
    /// Index into the profile list.
    pub profile: usize,
    pub editor_id: String,
    pub n_articles: usize,
    pub mean_duration: f64,
    pub band: &'static str,
}

/// Top-k editors by N_E, ties broken by editor id; truncated to the editor count.
pub fn rank_table(profiles: &[EditorProfile], k: usize) -> Vec<RankRow> {
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by(|&a, &b| {
        profiles[b]
            .n_articles
            .cmp(&profiles[a].n_articles)
            .then_with(|| profiles[a].editor_id.cmp(&profiles[b].editor_id))
    });
    order
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, p)| RankRow {
            rank: i + 1,
            profile: p,
            editor_id: profiles[p].editor_id.clone(),
            n_articles: profiles[p].n_articles,
            mean_duration: profiles[p].mean_duration,
            band: duration_band(profiles[p].mean_duration),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::testutil::{article, editor};
    use crate::corpus::{default_census_date, AuthorName, ReferenceEntry};
    use proptest::prelude::*;

    fn refs(editor_hits: usize, others: usize) -> Vec<ReferenceEntry> {
        let mut out = Vec::new();
        for _ in 0..editor_hits {
            out.push(ReferenceEntry {
                authors: vec![AuthorName::new("Smith", "A"), AuthorName::new("Perc", "Matjaž")],
            });
        }
        for _ in 0..others {
            out.push(ReferenceEntry {
                authors: vec![AuthorName::new("Jones", "B")],
            });
        }
        out
    }

    #[test]
    fn single_article_editor() {
        let corpus = Corpus::new(
            vec![article("a", "e1", "2010-01-01", "2010-03-01")],
            vec![editor("e1", "Perc", "M")],
            default_census_date(),
        )
        .unwrap();
        let m = build_profiles(&corpus);
        let p = &m.profiles[0];
        assert_eq!((p.n_articles, p.service_days), (1, 0));
        assert_eq!(p.cov_duration, None);
        assert_eq!(m.articles[0].tau, 0.0);
        assert!(p.top10);
    }

    #[test]
    fn two_articles_100_days_apart() {
        let corpus = Corpus::new(
            vec![
                article("a", "e1", "2010-01-01", "2010-01-11"),
                article("b", "e1", "2010-03-01", "2010-04-21"),
            ],
            vec![editor("e1", "Perc", "M")],
            default_census_date(),
        )
        .unwrap();
        let m = build_profiles(&corpus);
        let p = &m.profiles[0];
        assert_eq!(p.service_days, 100);
        assert_eq!(p.turnover_days, 50.0);
        assert_eq!(p.mean_duration, 30.5);
        // durations 10 and 51: sd = 41/√2
        let cov = 41.0 / 2f64.sqrt() / 30.5;
        assert!((p.cov_duration.unwrap() - cov).abs() < 1e-12);
        assert!((m.articles[1].tau - 100.0 / 365.25).abs() < 1e-15);
    }

    #[test]
    fn citation_rate_one_in_thirty() {
        let mut a = article("a", "e1", "2010-01-01", "2010-02-01");
        a.references = refs(1, 29);
        let e = editor("e1", "Perc", "M");
        let (c, f) = editor_citation_rate(&a, &e);
        assert_eq!(c, 1);
        assert!((f - 1.0 / 30.0).abs() < 1e-15);
        a.references = refs(0, 12);
        assert_eq!(editor_citation_rate(&a, &e), (0, 0.0));
        a.references.clear();
        assert_eq!(editor_citation_rate(&a, &e), (0, 0.0));
    }

    #[test]
    fn degenerate_editor_never_counts() {
        let mut a = article("a", "e1", "2010-01-01", "2010-02-01");
        a.references = vec![ReferenceEntry {
            authors: vec![AuthorName::new("Singh", "S")],
        }];
        let mut e = editor("e1", "Singh", "Shree");
        assert_eq!(editor_citation_rate(&a, &e).0, 1);
        e.degenerate = true;
        assert_eq!(editor_citation_rate(&a, &e), (0, 0.0));
    }

    #[test]
    fn rank_ties_break_by_id() {
        let articles = vec![
            article("a", "e2", "2010-01-01", "2010-02-01"),
            article("b", "e1", "2010-01-01", "2010-02-01"),
            article("c", "e3", "2010-01-01", "2010-02-01"),
            article("d", "e3", "2010-01-01", "2010-02-01"),
        ];
        let corpus = Corpus::new(
            articles,
            vec![editor("e1", "A", "A"), editor("e2", "B", "B"), editor("e3", "C", "C")],
            default_census_date(),
        )
        .unwrap();
        let m = build_profiles(&corpus);
        let ids: Vec<_> = rank_table(&m.profiles, 5).into_iter().map(|r| r.editor_id).collect();
        assert_eq!(ids, ["e3", "e1", "e2"]);
        assert_eq!(rank_table(&m.profiles, 1)[0].editor_id, "e3");
    }

    #[test]
    fn duration_bands() {
        assert_eq!(duration_band(50.0), "<90");
        assert_eq!(duration_band(130.0), "120-150");
        assert_eq!(duration_band(400.0), ">=180");
    }

    proptest! {
        #[test]
        fn aggregate_identities(
            rows in proptest::collection::vec((0usize..4, 0u32..400, 0usize..3, 0usize..6), 1..60)
        ) {
            let articles: Vec<_> = rows
                .iter()
                .enumerate()
                .map(|(i, &(e, offset, hits, others))| {
                    let received = chrono::NaiveDate::from_ymd_opt(2009, 1, 1).unwrap()
                        + chrono::Duration::days(i64::from(offset));
                    let accepted = received + chrono::Duration::days(i64::from(offset % 97));
                    let mut a = article(&format!("d{i}"), &format!("e{e}"), "2009-01-01", "2009-01-01");
                    a.received = received;
                    a.accepted = accepted;
                    a.references = refs(hits, others);
                    a
                })
                .collect();
            let editors = (0..4).map(|e| editor(&format!("e{e}"), "Perc", &format!("{}", (b'M' + e as u8) as char))).collect();
            let corpus = Corpus::new(articles, editors, default_census_date()).unwrap();
            let m = build_profiles(&corpus);
            prop_assert_eq!(m.profiles.iter().map(|p| p.n_articles).sum::<usize>(), corpus.len());
            for p in &m.profiles {
                // f_E is the reference-weighted mean of f_A
                let weighted: f64 = p.articles.iter().map(|&a| m.articles[a].f * m.articles[a].references as f64).sum();
                if p.total_references > 0 {
                    prop_assert!((weighted / p.total_references as f64 - p.f).abs() < 1e-12);
                }
                prop_assert!(p.editor_citations <= p.total_references);
                // τ ordering follows acceptance ordering
                for &a in &p.articles {
                    for &b in &p.articles {
                        let (da, db) = (corpus.articles()[a].accepted, corpus.articles()[b].accepted);
                        if da < db {
                            prop_assert!(m.articles[a].tau < m.articles[b].tau);
                        }
                    }
                    prop_assert!(m.articles[a].tau >= 0.0);
                }
            }
        }
    }
}
