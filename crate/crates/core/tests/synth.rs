use forensics_core::editor_metrics::{build_profiles, gini_pairwise};
use forensics_core::impact::{normalize, ImpactOptions};
use forensics_core::social::{tag_repeat_authors, SurnameBlacklist};
use forensics_core::synth::{generate, write_outputs, SynthConfig};
use forensics_core::taxonomy::{classify_corpus, KeywordWeightTable};

fn small(seed: u64) -> SynthConfig {
    let mut cfg = SynthConfig {
        seed,
        n_editors: 150,
        shared_name_pairs: 3,
        ..SynthConfig::default()
    };
    cfg.power.mean_articles = 8.0;
    cfg.power.max_articles = 80;
    cfg.references.mean_references = 12.0;
    cfg.references.base_rate = 0.02;
    cfg
}

#[test]
fn same_seed_same_bytes() {
    let cfg = small(7);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_outputs(&generate(&cfg).unwrap(), a.path()).unwrap();
    write_outputs(&generate(&cfg).unwrap(), b.path()).unwrap();
    for f in ["articles.jsonl", "editors.jsonl", "ground_truth.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs");
    }
    let other = generate(&small(8)).unwrap();
    assert_ne!(other.truth.n_articles, 0);
    assert_ne!(generate(&cfg).unwrap().articles, other.articles);
}

#[test]
fn detectors_recover_planted_bookkeeping() {
    let synth = generate(&small(11)).unwrap();
    let truth = synth.truth.clone();
    let corpus = synth.corpus().unwrap();
    assert_eq!(corpus.len(), truth.n_articles);

    let table = KeywordWeightTable::build(&corpus);
    assert_eq!(table.len(), truth.keyword_weights.len());
    for (kw, w) in table.iter() {
        assert_eq!(w, &truth.keyword_weights[kw], "weights for {kw}");
    }
    let classes = classify_corpus(&corpus, &table);
    for (c, t) in classes.iter().zip(&truth.articles) {
        assert_eq!(c.refined.map(|s| s.index()), Some(t.sa));
    }

    let metrics = build_profiles(&corpus);
    assert_eq!(metrics.profiles.len(), truth.n_editors);
    for (p, e) in metrics.profiles.iter().zip(&truth.editors) {
        assert_eq!(p.editor_id, e.editor_id);
        assert_eq!(p.n_articles, e.n_articles);
        assert_eq!(p.editor_citations, e.editor_citations);
        assert_eq!(p.total_references, e.references);
    }
    for (m, t) in metrics.articles.iter().zip(&truth.articles) {
        assert_eq!(m.editor_citations, t.editor_citations);
        assert_eq!(m.references, t.references);
        assert!((m.tau - t.tau).abs() < 1e-12);
    }

    let blacklist = SurnameBlacklist::build(corpus.editors());
    assert_eq!(blacklist.iter().collect::<Vec<_>>(), truth.blacklist);
    let degenerate: Vec<bool> = corpus.editors().iter().map(|e| e.degenerate).collect();
    let planted: Vec<bool> = truth.editors.iter().map(|e| e.degenerate).collect();
    assert_eq!(degenerate, planted);

    let ties = tag_repeat_authors(&corpus, &metrics, &blacklist);
    let planted_r: Vec<bool> = truth.articles.iter().map(|t| t.repeat).collect();
    assert_eq!(ties.r, planted_r);
    for (t, e) in ties.editors.iter().zip(&truth.editors) {
        assert_eq!(t.repeat_authors, e.repeat_authors);
        assert_eq!(t.repeat_articles, e.repeat_articles);
    }

    let impact = normalize(&corpus, &classes, &ImpactOptions::default());
    for (i, t) in truth.articles.iter().enumerate() {
        match (impact.z(i), t.z) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9, "z at {i}"),
            (None, None) => {}
            other => panic!("z definedness differs at {i}: {other:?}"),
        }
    }
    for (a, t) in corpus.articles().iter().zip(&truth.articles) {
        assert_eq!(a.citation_count, t.citations);
        assert_eq!(a.duration_days(), t.duration_days);
    }

    let counts: Vec<f64> = truth.editors.iter().map(|e| e.n_articles as f64).collect();
    assert!((gini_pairwise(&counts).unwrap() - truth.gini).abs() < 1e-12);
    assert!((truth.gini - 0.58).abs() < 0.02, "gini {}", truth.gini);
    assert_eq!(truth.editors.iter().filter(|e| e.top10).count(), 10);
}

#[test]
fn ground_truth_round_trips() {
    let synth = generate(&small(3)).unwrap();
    let json = serde_json::to_string(&synth.truth).unwrap();
    let back: forensics_core::synth::GroundTruth = serde_json::from_str(&json).unwrap();
    assert_eq!(back.editors, synth.truth.editors);
    assert_eq!(back.blacklist, synth.truth.blacklist);
}
