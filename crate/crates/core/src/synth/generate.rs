use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution, Normal, Poisson, StandardNormal};

use super::names::{NameFactory, Namespace};
use super::power::{gini_sorted, tune_powers};
use super::truth::{ArticleTruth, EditorTruth, GroundTruth, StratumTruth};
use super::{CausalOrder, Stream, SynthConfig, SynthError, MAX_DURATION_DAYS};
use crate::corpus::{
    default_census_date, normalize_surname, write_articles_jsonl, write_editors_jsonl, ArticleRecord,
    AuthorName, Corpus, CorpusError, EditorIdentity, ReferenceEntry, TopClass,
};
use crate::impact::ImpactOptions;

/// Offset of the cited-author pool inside the author namespace; fresh
/// article authors are numbered from 0 and never reach it.
const CITED_POOL_OFFSET: u64 = 2_000_000_000;

const TOP_EDITORS: usize = 10;

/// A generated corpus and its ground truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub articles: Vec<ArticleRecord>,
    pub editors: Vec<EditorIdentity>,
    pub truth: GroundTruth,
}

impl SynthCorpus {
    pub fn corpus(&self) -> Result<Corpus, CorpusError> {
        Corpus::new(self.articles.clone(), self.editors.clone(), default_census_date())
    }

    pub fn into_parts(self) -> Result<(Corpus, GroundTruth), CorpusError> {
        let corpus = Corpus::new(self.articles, self.editors, default_census_date())?;
        Ok((corpus, self.truth))
    }
}

fn stream_rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream as u64);
    rng
}

fn poisson(rng: &mut ChaCha20Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Principal top-level classes merged into each refined subject area.
const SA_CLASSES: [&[usize]; 6] = [&[0], &[1], &[2], &[3, 4], &[5, 6], &[7, 8]];

fn keyword(class: usize, j: usize) -> String {
    format!("{} {:03}", TopClass::ALL[class].label().to_lowercase(), j)
}

struct EditorPlan {
    n: usize,
    start: NaiveDate,
    window_days: i64,
    degenerate: bool,
    biased: bool,
    top10: bool,
    rate_other: f64,
    rate_repeat: f64,
    repeat_share: f64,
    alpha_delta: f64,
    alpha_impact: f64,
    trend: f64,
}

/// Article under construction, in editor-major order.
struct Draft {
    editor: usize,
    accepted: NaiveDate,
    tau: f64,
    sa: usize,
    principal: usize,
    classes: Vec<TopClass>,
    keywords: Vec<String>,
    authors: Vec<AuthorName>,
    repeat: bool,
    references: Vec<ReferenceEntry>,
    editor_citations: u64,
    duration: i64,
    citations: u64,
    latent: f64,
    z: Option<f64>,
}

impl Draft {
    fn f(&self) -> f64 {
        if self.references.is_empty() {
            0.0
        } else {
            self.editor_citations as f64 / self.references.len() as f64
        }
    }
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    config.validate()?;
    let n_editors = config.n_editors;

    // editor roster and powers
    let mut rng = stream_rng(config.seed, Stream::Editors);
    let mut u: Vec<f64> = (0..n_editors)
        .map(|i| (i as f64 + rng.random::<f64>()) / n_editors as f64)
        .map(|x| x.max(f64::MIN_POSITIVE))
        .collect();
    u.shuffle(&mut rng);
    let power = tune_powers(&u, &config.power)?;

    let mut names: Vec<AuthorName> = (0..n_editors)
        .map(|i| {
            let initial = (b'A' + rng.random_range(0..26u8)) as char;
            AuthorName::new(NameFactory::surname(Namespace::Editor, i as u64), initial.to_string())
        })
        .collect();
    let shared = index::sample(&mut rng, n_editors, 2 * config.shared_name_pairs).into_vec();
    let mut degenerate = vec![false; n_editors];
    let mut blacklist = Vec::new();
    for pair in shared.chunks(2) {
        names[pair[1]] = names[pair[0]].clone();
        degenerate[pair[0]] = true;
        degenerate[pair[1]] = true;
        blacklist.push(normalize_surname(&names[pair[0]].surname));
    }
    blacklist.sort();
    blacklist.dedup();
    let ids: Vec<String> = (0..n_editors).map(|i| format!("E{:05}", i + 1)).collect();

    let mut order: Vec<usize> = (0..n_editors).collect();
    order.sort_by(|&a, &b| power.counts[b].cmp(&power.counts[a]).then_with(|| ids[a].cmp(&ids[b])));
    let mut top10 = vec![false; n_editors];
    for &e in order.iter().take(TOP_EDITORS) {
        top10[e] = true;
    }

    let sched = &config.schedule;
    let first_date = NaiveDate::from_ymd_opt(sched.first_year, 1, 1).expect("valid year");
    let last_date = NaiveDate::from_ymd_opt(sched.last_year, 12, 31).expect("valid year");
    let span = (last_date - first_date).num_days();
    let refs = &config.references;
    let rate_base = Normal::new(0.0, refs.base_rate_spread).expect("finite spread");
    let share_dist = Beta::new(
        config.repeat.mean_share * config.repeat.concentration,
        (1.0 - config.repeat.mean_share) * config.repeat.concentration,
    )
    .expect("validated Beta parameters");
    let plans: Vec<EditorPlan> = (0..n_editors)
        .map(|e| {
            let n = power.counts[e];
            let offset = rng.random_range(0..=span - sched.min_service_days);
            let window_days = rng.random_range(sched.min_service_days..=span - offset);
            let biased = !degenerate[e] && rng.random::<f64>() < refs.biased_fraction;
            let scaling = (n as f64 / config.power.mean_articles).powf(refs.rate_scaling_exponent - 1.0);
            let rate_other = (refs.base_rate * rate_base.sample(&mut rng).exp() * scaling).min(0.5);
            let rate_repeat = if biased { (rate_other + refs.bias_gap).min(1.0) } else { rate_other };
            let repeat_share = share_dist.sample(&mut rng);
            let alpha_delta = config.acceptance.editor_sd * normal(&mut rng);
            let alpha_impact = config.impact.editor_sd * normal(&mut rng);
            let trend = if rng.random::<f64>() < config.impact.trend_fraction {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * config.impact.trend_slope
            } else {
                0.0
            };
            let (rate_other, rate_repeat) = if degenerate[e] { (0.0, 0.0) } else { (rate_other, rate_repeat) };
            EditorPlan {
                n,
                start: first_date + Duration::days(offset),
                window_days,
                degenerate: degenerate[e],
                biased,
                top10: top10[e],
                rate_other,
                rate_repeat,
                repeat_share,
                alpha_delta,
                alpha_impact,
                trend,
            }
        })
        .collect();

    // article structure
    let mut rng = stream_rng(config.seed, Stream::Articles);
    let tax = &config.taxonomy;
    let share_total: f64 = tax.sa_shares.iter().sum();
    let cumulative: Vec<f64> = tax
        .sa_shares
        .iter()
        .scan(0.0, |acc, &s| {
            *acc += s / share_total;
            Some(*acc)
        })
        .collect();
    let mut next_author: u64 = 0;
    let mut fresh_author = || {
        let name = NameFactory::name(Namespace::Author, next_author);
        next_author += 1;
        name
    };
    let mut drafts: Vec<Draft> = Vec::new();
    let mut clique_counts = vec![0usize; n_editors];
    for (e, plan) in plans.iter().enumerate() {
        let mut dates: Vec<NaiveDate> = (0..plan.n)
            .map(|i| {
                if i == 0 {
                    plan.start
                } else {
                    plan.start + Duration::days(rng.random_range(0..=plan.window_days))
                }
            })
            .collect();
        dates.sort();

        // repeat-author cliques
        let mut flagged: Vec<usize> = (0..plan.n)
            .filter(|_| rng.random::<f64>() < plan.repeat_share)
            .collect();
        flagged.shuffle(&mut rng);
        let size = config.repeat.clique_size;
        let mut cliques: Vec<Vec<usize>> = flagged.chunks(size).map(<[usize]>::to_vec).collect();
        if let Some(tail) = cliques.pop_if(|c| c.len() < 2) {
            if let Some(prev) = cliques.last_mut() {
                prev.extend(tail);
            }
        }
        let mut clique_of = vec![None; plan.n];
        for (c, members) in cliques.iter().enumerate() {
            for &a in members {
                clique_of[a] = Some(c);
            }
        }
        let clique_names: Vec<AuthorName> = cliques.iter().map(|_| fresh_author()).collect();
        clique_counts[e] = cliques.len();

        for (a, &accepted) in dates.iter().enumerate() {
            let tau = (accepted - dates[0]).num_days() as f64 / crate::editor_metrics::DAYS_PER_YEAR;
            let draw = rng.random::<f64>();
            let sa = cumulative.iter().position(|&c| draw < c).unwrap_or(5);
            let group = SA_CLASSES[sa];
            let principal = group[rng.random_range(0..group.len())];
            let with_biology = principal != 0 && rng.random::<f64>() < tax.biology_co_listing;
            let mut classes = Vec::with_capacity(2);
            let mut keywords = Vec::with_capacity(tax.keywords_per_article);
            // Biology-only articles draw from the core half of the Biology
            // vocabulary and co-listed articles from the shared half, so
            // Biology-only articles have no runner-up class and co-listed
            // ones always have P as runner-up
            if principal == 0 {
                for j in index::sample(&mut rng, tax.keywords_per_class, tax.keywords_per_article) {
                    keywords.push(keyword(0, j));
                }
            } else {
                let mut own = tax.keywords_per_article;
                if with_biology {
                    classes.push(TopClass::ALL[0]);
                    let shared = tax.keywords_per_article / 2;
                    own -= shared;
                    for j in index::sample(&mut rng, tax.keywords_per_class, shared) {
                        keywords.push(keyword(0, tax.keywords_per_class + j));
                    }
                }
                for j in index::sample(&mut rng, tax.keywords_per_class, own) {
                    keywords.push(keyword(principal, j));
                }
            }
            classes.push(TopClass::ALL[principal]);

            let k = 1 + poisson(&mut rng, config.team.mean_extra_authors) as usize;
            let mut authors: Vec<AuthorName> = (0..k).map(|_| fresh_author()).collect();
            if let Some(c) = clique_of[a] {
                let slot = rng.random_range(0..k);
                authors[slot] = clique_names[c].clone();
            }
            drafts.push(Draft {
                editor: e,
                accepted,
                tau,
                sa,
                principal,
                classes,
                keywords,
                authors,
                repeat: clique_of[a].is_some(),
                references: Vec::new(),
                editor_citations: 0,
                duration: 0,
                citations: 0,
                latent: 0.0,
                z: None,
            });
        }
    }

    // reference lists
    let mut rng = stream_rng(config.seed, Stream::References);
    let pool: Vec<AuthorName> = (0..refs.cited_pool_size as u64)
        .map(|i| NameFactory::name(Namespace::Author, CITED_POOL_OFFSET + i))
        .collect();
    for d in drafts.iter_mut() {
        let plan = &plans[d.editor];
        let rate = if d.repeat { plan.rate_repeat } else { plan.rate_other };
        let n_refs = poisson(&mut rng, refs.mean_references);
        d.references = (0..n_refs)
            .map(|_| {
                let m = 1 + poisson(&mut rng, refs.mean_reference_authors - 1.0) as usize;
                let mut authors: Vec<AuthorName> = (0..m)
                    .map(|_| pool[rng.random_range(0..pool.len())].clone())
                    .collect();
                if rng.random::<f64>() < rate {
                    let slot = rng.random_range(0..m);
                    authors[slot] = names[d.editor].clone();
                    d.editor_citations += 1;
                }
                ReferenceEntry { authors }
            })
            .collect();
    }

    // outcomes
    let mut rng = stream_rng(config.seed, Stream::Outcomes);
    let pool_year = ImpactOptions::default().first_year;
    let ln_tau = |tau: f64| (tau + crate::econometrics::DAY_IN_YEARS).ln();
    let acc = &config.acceptance;
    let draw_duration = |d: &Draft, z: f64, rng: &mut ChaCha20Rng| -> i64 {
        let plan = &plans[d.editor];
        let f = d.f();
        let r = f64::from(u8::from(d.repeat));
        let eta = acc.intercept
            + acc.beta_z * z
            + acc.beta_ln_k * (d.authors.len() as f64).ln()
            + acc.beta_f * f
            + acc.beta_ln_tau * ln_tau(d.tau)
            + acc.beta_r * r
            + acc.beta_f_r * f * r
            + plan.alpha_delta
            + acc.noise_sd * normal(rng);
        (eta.exp() - 1.0).round().clamp(0.0, MAX_DURATION_DAYS as f64) as i64
    };
    if config.causal_order == CausalOrder::AcceptanceFirst {
        for d in &mut drafts {
            d.duration = draw_duration(d, 0.0, &mut rng);
        }
    }
    let imp = &config.impact;
    let linear: Vec<f64> = drafts
        .iter()
        .map(|d| {
            let plan = &plans[d.editor];
            let r = f64::from(u8::from(d.repeat));
            let t = f64::from(u8::from(plan.top10));
            let lt = ln_tau(d.tau);
            let delta_term = match config.causal_order {
                CausalOrder::AcceptanceFirst => imp.beta_ln_delta * (d.duration as f64).ln_1p(),
                CausalOrder::ImpactFirst => 0.0,
            };
            imp.beta_ln_k * (d.authors.len() as f64).ln()
                + delta_term
                + imp.beta_ln_tau * lt
                + imp.beta_r * r
                + imp.beta_r_ln_tau * r * lt
                + imp.beta_t10_r * t * r
                + imp.beta_t10_ln_tau * t * lt
                + imp.beta_t10_r_ln_tau * t * r * lt
                + plan.alpha_impact
                + plan.trend * d.tau
        })
        .collect();
    let n_articles = drafts.len();
    let lin_mean = linear.iter().sum::<f64>() / n_articles.max(1) as f64;
    let lin_var = linear.iter().map(|x| (x - lin_mean).powi(2)).sum::<f64>() / n_articles.max(1) as f64;
    if lin_var >= 1.0 {
        return Err(SynthError::ImpactVariance(lin_var));
    }
    let impact_noise_sd = (1.0 - lin_var).sqrt();
    let cit = &config.citation;
    let stratum_year = |d: &Draft| d.accepted.year().max(pool_year);
    let location = |sa: usize, year: i32| {
        cit.mu_last_year + cit.mu_per_year * f64::from(sched.last_year - year) + cit.mu_sa_offset[sa]
    };
    for (d, l) in drafts.iter_mut().zip(&linear) {
        d.latent = l - lin_mean + impact_noise_sd * normal(&mut rng);
        let x = location(d.sa, stratum_year(d)) + cit.sigma[d.sa] * d.latent;
        d.citations = (x.exp().round() - 1.0).max(0.0) as u64;
    }

    // z per (subject area, year) stratum, as the detector defines it
    let mut strata: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    for (i, d) in drafts.iter().enumerate() {
        strata.entry((d.sa, stratum_year(d))).or_default().push(i);
    }
    for members in strata.values() {
        if members.len() < 2 {
            continue;
        }
        let logs: Vec<f64> = members.iter().map(|&i| (drafts[i].citations as f64).ln_1p()).collect();
        let m = logs.iter().sum::<f64>() / logs.len() as f64;
        let sd = (logs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (logs.len() - 1) as f64).sqrt();
        if sd > 0.0 {
            for (&i, x) in members.iter().zip(&logs) {
                drafts[i].z = Some((x - m) / sd);
            }
        }
    }
    if config.causal_order == CausalOrder::ImpactFirst {
        for d in &mut drafts {
            let z = d.z.unwrap_or(0.0);
            d.duration = draw_duration(d, z, &mut rng);
        }
    }

    // corpus order: by acceptance date, then editor, then editor-local order
    let mut perm: Vec<usize> = (0..n_articles).collect();
    perm.sort_by_key(|&i| (drafts[i].accepted, drafts[i].editor, i));

    let mut keyword_counts: BTreeMap<String, [u64; 10]> = BTreeMap::new();
    let mut articles = Vec::with_capacity(n_articles);
    let mut article_truth = Vec::with_capacity(n_articles);
    let mut slots: Vec<Option<Draft>> = drafts.into_iter().map(Some).collect();
    for (pos, &i) in perm.iter().enumerate() {
        let d = slots[i].take().expect("each draft used once");
        for kw in &d.keywords {
            let row = keyword_counts.entry(kw.clone()).or_insert([0; 10]);
            for c in &d.classes {
                row[c.position()] += 1;
            }
        }
        article_truth.push(ArticleTruth {
            editor: d.editor,
            sa: d.sa as u8 + 1,
            principal: d.principal as u8 + 1,
            repeat: d.repeat,
            team_size: d.authors.len(),
            tau: d.tau,
            duration_days: d.duration,
            references: d.references.len() as u64,
            editor_citations: d.editor_citations,
            citations: d.citations,
            latent_impact: d.latent,
            z: d.z,
        });
        articles.push(ArticleRecord {
            doi: format!("10.5555/synth.{:07}", pos + 1),
            editor_id: ids[d.editor].clone(),
            received: d.accepted - Duration::days(d.duration),
            accepted: d.accepted,
            year: d.accepted.year(),
            authors: d.authors,
            keywords: d.keywords,
            top_level_classes: d.classes,
            references: d.references,
            citation_count: d.citations,
        });
    }
    let keyword_weights = keyword_counts
        .into_iter()
        .map(|(k, row)| {
            let total: u64 = row.iter().sum();
            let mut w = [0.0; 10];
            for (x, &c) in w.iter_mut().zip(&row) {
                *x = c as f64 / total as f64;
            }
            (k, w)
        })
        .collect();

    let mut editor_truth: Vec<EditorTruth> = plans
        .iter()
        .enumerate()
        .map(|(e, p)| EditorTruth {
            editor_id: ids[e].clone(),
            surname: names[e].surname.clone(),
            initial: names[e].initial.clone(),
            n_articles: p.n,
            degenerate: p.degenerate,
            biased: p.biased,
            top10: p.top10,
            rate_other: p.rate_other,
            rate_repeat: p.rate_repeat,
            repeat_share: p.repeat_share,
            repeat_authors: clique_counts[e],
            repeat_articles: 0,
            acceptance_intercept: p.alpha_delta,
            impact_intercept: p.alpha_impact,
            impact_trend: p.trend,
            mean_duration: 0.0,
            references: 0,
            editor_citations: 0,
        })
        .collect();
    for t in &article_truth {
        let e = &mut editor_truth[t.editor];
        e.repeat_articles += usize::from(t.repeat);
        e.mean_duration += t.duration_days as f64;
        e.references += t.references;
        e.editor_citations += t.editor_citations;
    }
    for e in editor_truth.iter_mut() {
        e.mean_duration /= e.n_articles as f64;
    }

    let mut stratum_truth: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    let mut sa_counts = [0u64; 6];
    for (t, a) in article_truth.iter().zip(&articles) {
        sa_counts[usize::from(t.sa) - 1] += 1;
        *stratum_truth.entry((usize::from(t.sa) - 1, a.year.max(pool_year))).or_default() += 1;
    }
    let strata = stratum_truth
        .into_iter()
        .map(|((sa, year), n)| StratumTruth {
            sa: sa as u8 + 1,
            year,
            mu: location(sa, year),
            sigma: cit.sigma[sa],
            n,
        })
        .collect();

    let top10_articles: usize = editor_truth.iter().filter(|e| e.top10).map(|e| e.n_articles).sum();
    let repeat_articles = article_truth.iter().filter(|t| t.repeat).count();
    let mut effective = config.clone();
    if config.power.fixed_articles.is_none() {
        effective.power.exponent = power.exponent;
    }
    let truth = GroundTruth {
        config: effective,
        power_exponent: power.exponent,
        power_scale: power.scale,
        n_articles,
        n_editors,
        gini: gini_sorted(&power.counts.iter().map(|&c| c as f64).collect::<Vec<_>>()),
        top10_articles,
        top10_share: top10_articles as f64 / n_articles as f64,
        blacklist,
        repeat_articles,
        repeat_share: repeat_articles as f64 / n_articles as f64,
        total_references: article_truth.iter().map(|t| t.references).sum(),
        total_editor_citations: article_truth.iter().map(|t| t.editor_citations).sum(),
        impact_noise_sd,
        sa_counts,
        strata,
        keyword_weights,
        editors: editor_truth,
        articles: article_truth,
    };
    let editors = names
        .into_iter()
        .zip(ids)
        .map(|(name, id)| EditorIdentity::new(id, name).expect("generated surnames are non-empty"))
        .collect();
    Ok(SynthCorpus {
        articles,
        editors,
        truth,
    })
}

/// Writes `articles.jsonl`, `editors.jsonl` and `ground_truth.json` into `dir`.
pub fn write_outputs(corpus: &SynthCorpus, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join("articles.jsonl"))?);
    write_articles_jsonl(&corpus.articles, &mut out)?;
    out.flush()?;
    let mut out = BufWriter::new(File::create(dir.join("editors.jsonl"))?);
    write_editors_jsonl(&corpus.editors, &mut out)?;
    out.flush()?;
    let mut out = BufWriter::new(File::create(dir.join("ground_truth.json"))?);
    serde_json::to_writer_pretty(&mut out, &corpus.truth)?;
    out.write_all(b"\n")?;
    out.flush()
}
