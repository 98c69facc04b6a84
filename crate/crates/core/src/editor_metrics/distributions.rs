//! Plot-ready histograms of the editor and article measures.

use serde::Serialize;

use super::EditorMetrics;
use crate::corpus::Corpus;
use crate::social::TieAnnotation;
use crate::stats::mean;

pub const DEFAULT_BINS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionPanel {
    /// Figure panel identifier, e.g. `fig1-b`.
    pub figure: &'static str,
    pub name: &'static str,
    /// Whether the min-N editor filter applies to this panel.
    pub filtered: bool,
    pub n: usize,
    pub mean: Option<f64>,
    pub bins: Vec<Bin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTables {
    pub min_n: usize,
    pub panels: Vec<DistributionPanel>,
}

impl DistributionTables {
    pub fn panel(&self, name: &str) -> Option<&DistributionPanel> {
        self.panels.iter().find(|p| p.name == name)
    }
}

/// Equal-width bins over [min, max]; the maximum falls in the last bin and a
/// constant sample produces a single degenerate bin.
pub fn histogram(values: &[f64], n_bins: usize) -> Vec<Bin> {
    let Some(lo) = values.iter().copied().min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let hi = values.iter().copied().max_by(f64::total_cmp).expect("non-empty");
    if lo == hi || n_bins <= 1 {
        return vec![Bin {
            lower: lo,
            upper: hi,
            count: values.len() as u64,
        }];
    }
    let width = (hi - lo) / n_bins as f64;
    let mut bins: Vec<Bin> = (0..n_bins)
        .map(|i| Bin {
            lower: lo + width * i as f64,
            upper: if i + 1 == n_bins { hi } else { lo + width * (i + 1) as f64 },
            count: 0,
        })
        .collect();
    for &v in values {
        let i = (((v - lo) / width) as usize).min(n_bins - 1);
        bins[i].count += 1;
    }
    bins
}

fn panel(figure: &'static str, name: &'static str, filtered: bool, values: &[f64], n_bins: usize) -> DistributionPanel {
    DistributionPanel {
        figure,
        name,
        filtered,
        n: values.len(),
        mean: mean(values),
        bins: histogram(values, n_bins),
    }
}

/// Histograms of N_E and Δ_A over everything, and of d_E, Δ_E, f_A, cov_E,
/// K2_E and ρ_E over editors with N_E ≥ `min_n`. Tie panels are omitted when
/// `ties` is `None`.
pub fn distribution_tables(
    corpus: &Corpus,
    metrics: &EditorMetrics,
    ties: Option<&TieAnnotation>,
    min_n: usize,
    n_bins: usize,
) -> DistributionTables {
    let profiles = &metrics.profiles;
    let kept: Vec<usize> = (0..profiles.len())
        .filter(|&p| profiles[p].n_articles >= min_n)
        .collect();
    let editor_values = |f: &dyn Fn(usize) -> Option<f64>| -> Vec<f64> {
        kept.iter().filter_map(|&p| f(p)).collect()
    };

    let n_e: Vec<f64> = profiles.iter().map(|p| p.n_articles as f64).collect();
    let durations: Vec<f64> = corpus
        .articles()
        .iter()
        .map(|a| a.duration_days() as f64)
        .collect();
    let f_a: Vec<f64> = kept
        .iter()
        .flat_map(|&p| profiles[p].articles.iter().map(|&a| metrics.articles[a].f))
        .collect();

    let mut panels = vec![
        panel("fig1-b", "n_articles", false, &n_e, n_bins),
        panel("fig1-d", "article_duration", false, &durations, n_bins),
        panel(
            "fig1-e",
            "turnover_days",
            true,
            &editor_values(&|p| Some(profiles[p].turnover_days)),
            n_bins,
        ),
        panel(
            "fig1-f",
            "editor_mean_duration",
            true,
            &editor_values(&|p| Some(profiles[p].mean_duration)),
            n_bins,
        ),
        panel("fig1-g", "article_f", true, &f_a, n_bins),
        panel(
            "figS2-a",
            "editor_cov_duration",
            true,
            &editor_values(&|p| profiles[p].cov_duration),
            n_bins,
        ),
    ];
    if let Some(ties) = ties {
        panels.push(panel(
            "figS2-b",
            "repeat_authors",
            true,
            &editor_values(&|p| Some(ties.editors[p].repeat_authors as f64)),
            n_bins,
        ));
        panels.push(panel(
            "figS2-c",
            "repeat_share",
            true,
            &editor_values(&|p| Some(ties.editors[p].rho)),
            n_bins,
        ));
    }
    DistributionTables { min_n, panels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_census_date;
    use crate::corpus::testutil::{article, editor};
    use crate::editor_metrics::build_profiles;
    use proptest::prelude::*;

    #[test]
    fn single_editor_single_bin() {
        let corpus = Corpus::new(
            vec![
                article("a", "e1", "2010-01-01", "2010-02-01"),
                article("b", "e1", "2010-01-01", "2010-02-01"),
            ],
            vec![editor("e1", "Perc", "M")],
            default_census_date(),
        )
        .unwrap();
        let metrics = build_profiles(&corpus);
        let tables = distribution_tables(&corpus, &metrics, None, 1, DEFAULT_BINS);
        for name in ["n_articles", "article_duration", "turnover_days", "editor_mean_duration"] {
            let p = tables.panel(name).unwrap();
            assert_eq!(p.bins.len(), 1, "{name}");
        }
        assert_eq!(tables.panel("article_duration").unwrap().mean, Some(31.0));
    }

    #[test]
    fn min_n_filters_editor_panels_only() {
        let corpus = Corpus::new(
            vec![
                article("a", "e1", "2010-01-01", "2010-02-01"),
                article("b", "e1", "2010-01-01", "2010-02-01"),
                article("c", "e2", "2010-01-01", "2010-03-01"),
            ],
            vec![editor("e1", "Perc", "M"), editor("e2", "Uversky", "V")],
            default_census_date(),
        )
        .unwrap();
        let metrics = build_profiles(&corpus);
        let t = distribution_tables(&corpus, &metrics, None, 2, 10);
        assert_eq!(t.panel("n_articles").unwrap().n, 2);
        assert_eq!(t.panel("article_duration").unwrap().n, 3);
        assert_eq!(t.panel("turnover_days").unwrap().n, 1);
        assert_eq!(t.panel("article_f").unwrap().n, 2);
    }

    proptest! {
        #[test]
        fn histogram_conserves_counts(values in proptest::collection::vec(-100.0..100.0f64, 1..300), bins in 1usize..50) {
            let h = histogram(&values, bins);
            prop_assert_eq!(h.iter().map(|b| b.count).sum::<u64>(), values.len() as u64);
        }
    }
}
