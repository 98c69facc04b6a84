//! Detrended, field-stratified citation impact.
//!
//! Within each (refined subject area s, publication year t) stratum,
//! `z = (ln(1+c) − μ) / σ` with the stratum's sample mean and sample standard
//! deviation of ln(1+c). Years before the first full year are pooled into it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::stats::{ks_distance, normal_cdf, sample_sd, Moments};
use crate::taxonomy::{Classification, RefinedSubjectArea};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactOptions {
    /// Articles dated before this year are pooled into it.
    pub first_year: i32,
    /// Articles after this year get z but are flagged out of the impact model.
    pub last_model_year: i32,
}

impl Default for ImpactOptions {
    fn default() -> Self {
        Self {
            first_year: 2007,
            last_model_year: 2014,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StratumKey {
    pub s: RefinedSubjectArea,
    pub t: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub key: StratumKey,
    /// Article indices, in corpus order.
    pub members: Vec<usize>,
    pub mean: f64,
    /// Sample sd of ln(1+c); `None` with fewer than two members.
    pub sd: Option<f64>,
}

impl Stratum {
    /// z is defined only with ≥ 2 members and positive spread.
    pub fn is_defined(&self) -> bool {
        self.sd.is_some_and(|sd| sd > 0.0)
    }
}

/// Why an article does not enter the impact regression sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    Unresolved,
    ZUndefined,
    AfterLastModelYear,
}

impl Exclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Exclusion::Unresolved => "unresolved",
            Exclusion::ZUndefined => "z_undefined",
            Exclusion::AfterLastModelYear => "after_last_model_year",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactScore {
    pub s: Option<RefinedSubjectArea>,
    /// Year after pooling.
    pub t: i32,
    pub z: Option<f64>,
    pub excluded: Option<Exclusion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpactTable {
    /// One score per article, in corpus order.
    pub scores: Vec<ImpactScore>,
    pub strata: Vec<Stratum>,
}

impl ImpactTable {
    pub fn z(&self, article: usize) -> Option<f64> {
        self.scores[article].z
    }

    /// Number of strata (and their total membership) without a defined z.
    pub fn undefined_strata(&self) -> (usize, usize) {
        self.strata
            .iter()
            .filter(|s| !s.is_defined())
            .fold((0, 0), |(n, m), s| (n + 1, m + s.members.len()))
    }
}

pub fn log_citations(c: u64) -> f64 {
    (c as f64).ln_1p()
}

pub fn normalize(
    corpus: &Corpus,
    classes: &[Classification],
    options: &ImpactOptions,
) -> ImpactTable {
    assert_eq!(classes.len(), corpus.len(), "one classification per article");
    let articles = corpus.articles();
    let year = |i: usize| articles[i].year.max(options.first_year);

    let mut groups: BTreeMap<StratumKey, Vec<usize>> = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        if let Some(s) = c.refined {
            groups.entry(StratumKey { s, t: year(i) }).or_default().push(i);
        }
    }

    let strata: Vec<Stratum> = groups
        .into_par_iter()
        .map(|(key, members)| {
            let values: Vec<f64> = members
                .iter()
                .map(|&i| log_citations(articles[i].citation_count))
                .collect();
            Stratum {
                key,
                mean: crate::stats::mean(&values).expect("strata are non-empty"),
                sd: sample_sd(&values),
                members,
            }
        })
        .collect();

    let mut scores: Vec<ImpactScore> = (0..corpus.len())
        .map(|i| ImpactScore {
            s: classes[i].refined,
            t: year(i),
            z: None,
            excluded: Some(Exclusion::Unresolved),
        })
        .collect();
    for stratum in &strata {
        let defined = stratum.is_defined();
        for &i in &stratum.members {
            let score = &mut scores[i];
            if defined {
                let x = log_citations(articles[i].citation_count);
                score.z = Some((x - stratum.mean) / stratum.sd.expect("defined stratum"));
                score.excluded = (score.t > options.last_model_year)
                    .then_some(Exclusion::AfterLastModelYear);
            } else {
                score.excluded = Some(Exclusion::ZUndefined);
            }
        }
    }
    ImpactTable { scores, strata }
}

/// Distributional check of one stratum's z values against N(0,1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumNormality {
    pub key: StratumKey,
    pub n: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_distance: f64,
    pub poor_convergence: bool,
}

pub const DEFAULT_KS_THRESHOLD: f64 = 0.05;

/// One row per stratum with defined z; undefined strata are skipped.
pub fn stratum_normality_report(table: &ImpactTable, ks_threshold: f64) -> Vec<StratumNormality> {
    table
        .strata
        .iter()
        .filter(|s| s.is_defined())
        .map(|stratum| {
            let z: Vec<f64> = stratum
                .members
                .iter()
                .filter_map(|&i| table.scores[i].z)
                .collect();
            let moments = Moments::of(&z).expect("defined strata have members");
            let ks = ks_distance(&z, normal_cdf);
            StratumNormality {
                key: stratum.key,
                n: z.len(),
                skewness: moments.skewness().unwrap_or(0.0),
                excess_kurtosis: moments.excess_kurtosis().unwrap_or(0.0),
                ks_distance: ks,
                poor_convergence: ks > ks_threshold,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::testutil::{article, editor};
    use crate::corpus::{default_census_date, TopClass};
    use crate::stats::mean;
    use proptest::prelude::*;

    fn resolved(s: u8) -> Classification {
        let s = RefinedSubjectArea::new(s).unwrap();
        Classification {
            top_ranked: Some(TopClass::PhysicalSciences),
            principal: Some(TopClass::PhysicalSciences),
            refined: Some(s),
        }
    }

    fn corpus_with(citations: &[(u64, i32)]) -> Corpus {
        let articles = citations
            .iter()
            .enumerate()
            .map(|(i, &(c, year))| {
                let mut a = article(&format!("d{i}"), "e1", "2010-01-01", "2010-02-01");
                a.citation_count = c;
                a.year = year;
                a
            })
            .collect();
        Corpus::new(articles, vec![editor("e1", "Perc", "M")], default_census_date()).unwrap()
    }

    #[test]
    fn constant_stratum_is_undefined() {
        let corpus = corpus_with(&[(3, 2010), (3, 2010), (3, 2010)]);
        let table = normalize(&corpus, &vec![resolved(2); 3], &ImpactOptions::default());
        assert!(table.scores.iter().all(|s| s.z.is_none()));
        assert!(table
            .scores
            .iter()
            .all(|s| s.excluded == Some(Exclusion::ZUndefined)));
        assert!(stratum_normality_report(&table, DEFAULT_KS_THRESHOLD).is_empty());
    }

    #[test]
    fn two_point_stratum_closed_form() {
        // two values x1 < x2: sample sd |x2 − x1|/√2, so z = ∓1/√2 whatever c is
        let corpus = corpus_with(&[(0, 2010), (5, 2010)]);
        let table = normalize(&corpus, &vec![resolved(1); 2], &ImpactOptions::default());
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((table.z(0).unwrap() + expected).abs() < 1e-15);
        assert!((table.z(1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn early_years_pool_and_late_years_flag() {
        let corpus = corpus_with(&[(1, 2006), (4, 2007), (2, 2015), (9, 2015)]);
        let table = normalize(&corpus, &vec![resolved(3); 4], &ImpactOptions::default());
        assert_eq!(table.strata.len(), 2);
        assert_eq!(table.scores[0].t, 2007);
        assert_eq!(table.strata[0].members, vec![0, 1]);
        assert_eq!(table.scores[0].excluded, None);
        assert_eq!(table.scores[2].excluded, Some(Exclusion::AfterLastModelYear));
        assert!(table.scores[2].z.is_some());
    }

    #[test]
    fn singleton_and_unresolved() {
        let corpus = corpus_with(&[(1, 2010), (4, 2011)]);
        let classes = vec![resolved(1), Classification::UNRESOLVED];
        let table = normalize(&corpus, &classes, &ImpactOptions::default());
        assert_eq!(table.scores[0].excluded, Some(Exclusion::ZUndefined));
        assert_eq!(table.scores[1].excluded, Some(Exclusion::Unresolved));
        assert_eq!(table.undefined_strata(), (1, 1));
    }

    proptest! {
        #[test]
        fn strata_are_standardized(
            rows in proptest::collection::vec((0u64..5000, 2008i32..2012, 1u8..=3), 2..200)
        ) {
            let citations: Vec<(u64, i32)> = rows.iter().map(|r| (r.0, r.1)).collect();
            let corpus = corpus_with(&citations);
            let classes: Vec<_> = rows.iter().map(|r| resolved(r.2)).collect();
            let table = normalize(&corpus, &classes, &ImpactOptions::default());
            for stratum in table.strata.iter().filter(|s| s.is_defined()) {
                let z: Vec<f64> = stratum.members.iter().map(|&i| table.z(i).unwrap()).collect();
                prop_assert!(mean(&z).unwrap().abs() < 1e-12);
                prop_assert!((sample_sd(&z).unwrap() - 1.0).abs() < 1e-12);
                for &i in &stratum.members {
                    for &j in &stratum.members {
                        let (ci, cj) = (citations[i].0, citations[j].0);
                        if ci > cj {
                            prop_assert!(table.z(i).unwrap() > table.z(j).unwrap());
                        }
                    }
                }
            }
        }
    }
}
