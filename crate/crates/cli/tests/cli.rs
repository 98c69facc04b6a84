use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn forensics(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forensics"))
        .args(args)
        .env("FORENSICS_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = forensics(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn synth_corpus(dir: &Path) -> PathBuf {
    let config = dir.join("synth.json");
    std::fs::write(
        &config,
        r#"{"seed": 11, "n_editors": 120, "power": {"mean_articles": 12.0, "max_articles": 90}, "references": {"mean_references": 6.0}}"#,
    )
    .unwrap();
    let data = dir.join("data");
    ok(&["synth", "--config", p(&config), "--out-dir", p(&data)]);
    data
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn stages_chain_and_detect_stale_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_corpus(dir.path());
    let corpus = dir.path().join("corpus.bin");
    ok(&[
        "ingest",
        "--articles",
        p(&data.join("articles.jsonl")),
        "--editors",
        p(&data.join("editors.jsonl")),
        "--out",
        p(&corpus),
    ]);
    let c = p(&corpus);
    let out = |name: &str| dir.path().join(name);
    ok(&["classify", "--corpus", c, "--out", p(&out("classes.csv"))]);
    ok(&["normalize", "--corpus", c, "--classes", p(&out("classes.csv")), "--out", p(&out("impact.csv"))]);
    ok(&[
        "metrics",
        "--corpus",
        c,
        "--impact",
        p(&out("impact.csv")),
        "--out",
        p(&out("profiles.csv")),
        "--dist-out",
        p(&out("dists")),
        "--min-n",
        "10",
    ]);
    ok(&[
        "ties",
        "--corpus",
        c,
        "--profiles",
        p(&out("profiles.csv")),
        "--out",
        p(&out("ties.csv")),
        "--blacklist-out",
        p(&out("blacklist.txt")),
    ]);
    ok(&["regress", "--corpus", c, "--model", "II", "--out", p(&out("fit.json"))]);
    ok(&[
        "renumerate",
        "--corpus",
        c,
        "--min-n",
        "20",
        "--out",
        p(&out("renum.csv")),
        "--tests-out",
        p(&out("tests.json")),
        "--scatter-out",
        p(&out("fig3c.csv")),
    ]);

    let classes = std::fs::read_to_string(out("classes.csv")).unwrap();
    assert!(classes.starts_with("doi,top_ranked,principal_class,refined_sa\n"));
    let impact = std::fs::read_to_string(out("impact.csv")).unwrap();
    assert!(impact.starts_with("doi,s,t,z,excluded_flag\n"));
    assert_eq!(impact.lines().count(), classes.lines().count());
    let ties = std::fs::read_to_string(out("ties.csv")).unwrap();
    assert!(ties.starts_with("doi,editor_id,R\n"));
    assert!(out("dists/fig1-c.csv").exists());
    assert!(std::fs::read_to_string(out("fig3c.csv")).unwrap().starts_with("# figure: fig3-c\n"));
    let fit = read_json(&out("fit.json"));
    assert_eq!(fit["model"], "II");
    assert!(fit["coefficients"].as_array().unwrap().iter().any(|c| c["name"] == "R"));

    // a hand-edited upstream artifact is rejected
    std::fs::write(out("classes.csv"), classes.replacen(",1,", ",2,", 1)).unwrap();
    let stale = forensics(&["normalize", "--corpus", c, "--classes", p(&out("classes.csv")), "--out", p(&out("impact2.csv"))]);
    assert_eq!(code(&stale), 7);
    assert!(String::from_utf8_lossy(&stale.stderr).contains("normalize"));
    assert!(!out("impact2.csv").exists());
}

#[test]
fn report_is_cached_deterministic_and_matches_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_corpus(dir.path());
    let config = dir.path().join("pipeline.conf");
    std::fs::write(
        &config,
        "# end-to-end run\narticles = data/articles.jsonl\neditors = data/editors.jsonl\nout_dir = report\ncorpus_cache = corpus.bin\n",
    )
    .unwrap();
    let first = ok(&["report", "--config", p(&config)]);
    assert!(String::from_utf8_lossy(&first.stderr).contains("written"));
    let report = dir.path().join("report");
    let snapshot = |root: &Path| -> Vec<(String, Vec<u8>)> {
        let manifest = read_json(&root.join("manifest.json"));
        let mut files: Vec<(String, Vec<u8>)> = manifest["outputs"]
            .as_object()
            .unwrap()
            .keys()
            .map(|rel| (rel.clone(), std::fs::read(root.join(rel)).unwrap()))
            .collect();
        files.push(("manifest.json".into(), std::fs::read(root.join("manifest.json")).unwrap()));
        files
    };
    let before = snapshot(&report);
    assert!(before.iter().any(|(name, _)| name == "table1.csv"));

    let second = ok(&["report", "--config", p(&config)]);
    assert!(String::from_utf8_lossy(&second.stderr).contains("up to date"));
    assert_eq!(snapshot(&report), before);

    // a damaged artifact forces a recompute that restores identical bytes
    std::fs::write(report.join("summary.json"), "{}").unwrap();
    let third = ok(&["report", "--config", p(&config)]);
    assert!(String::from_utf8_lossy(&third.stderr).contains("written"));
    assert_eq!(snapshot(&report), before);

    // the cached corpus reproduces the same report
    let from_cache = dir.path().join("from_cache.conf");
    std::fs::write(&from_cache, "corpus = corpus.bin\nout_dir = report2\n").unwrap();
    ok(&["report", "--config", p(&from_cache)]);
    for (name, bytes) in &before {
        if name != "manifest.json" {
            assert_eq!(&std::fs::read(dir.path().join("report2").join(name)).unwrap(), bytes, "{name}");
        }
    }

    let truth = read_json(&data.join("ground_truth.json"));
    let summary = read_json(&report.join("summary.json"));
    assert_eq!(summary["corpus"]["articles"], truth["n_articles"]);
    assert_eq!(summary["corpus"]["editors"], truth["n_editors"]);
    assert_eq!(summary["power"]["top10_articles"], truth["top10_articles"]);
    let gini = summary["power"]["gini"].as_f64().unwrap();
    assert!((gini - truth["gini"].as_f64().unwrap()).abs() < 1e-8);
    let share = summary["ties"]["share_repeat"].as_f64().unwrap();
    assert!((share - truth["repeat_share"].as_f64().unwrap()).abs() < 1e-8);
    assert_eq!(summary["citations"]["total_editor_citations"], truth["total_editor_citations"]);

    let headline = ok(&["summary", "--report-dir", p(&report)]);
    let text = String::from_utf8(headline.stdout).unwrap();
    assert!(text.starts_with("statistic,value\n"));
    assert!(text.contains(&format!("articles,{}\n", truth["n_articles"])));
    let recomputed = ok(&["summary", "--corpus", p(&dir.path().join("corpus.bin"))]);
    assert_eq!(String::from_utf8(recomputed.stdout).unwrap(), text);
}

#[test]
fn failure_classes_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    std::fs::write(path("articles.jsonl"), "").unwrap();
    std::fs::write(path("editors.jsonl"), "{\"editor_id\":\"E1\",\"surname\":\"Smith\",\"initial\":\"J\"}\n").unwrap();
    let ingest = |articles: &Path| {
        forensics(&[
            "ingest",
            "--articles",
            p(articles),
            "--editors",
            p(&path("editors.jsonl")),
            "--out",
            p(&path("corpus.bin")),
        ])
    };

    let empty = ingest(&path("articles.jsonl"));
    assert_eq!(code(&empty), 5, "{}", String::from_utf8_lossy(&empty.stderr));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("ingest"));
    assert!(!path("corpus.bin").exists());

    assert_eq!(code(&ingest(&path("missing.jsonl"))), 4);

    std::fs::write(path("bad.conf"), "out_dir = o\ncolour = red\n").unwrap();
    assert_eq!(code(&forensics(&["report", "--config", p(&path("bad.conf"))])), 3);

    std::fs::write(path("corrupt.bin"), "forensics-corpus v1\n{not json").unwrap();
    assert_eq!(code(&forensics(&["classify", "--corpus", p(&path("corrupt.bin")), "--out", p(&path("c.csv"))])), 6);

    std::fs::write(path("infeasible.json"), r#"{"n_editors": 0}"#).unwrap();
    assert_eq!(
        code(&forensics(&["synth", "--config", p(&path("infeasible.json")), "--out-dir", p(&path("d"))])),
        9
    );

    assert_eq!(code(&forensics(&["regress", "--model", "III", "--corpus", "x", "--out", "y"])), 2);

    let threads = Command::new(env!("CARGO_BIN_EXE_forensics"))
        .args(["summary", "--report-dir", p(dir.path())])
        .env("FORENSICS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&threads), 3);
}

#[test]
fn regress_reports_fit_failures() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth_corpus(dir.path());
    let corpus = dir.path().join("corpus.bin");
    ok(&[
        "ingest",
        "--articles",
        p(&data.join("articles.jsonl")),
        "--editors",
        p(&data.join("editors.jsonl")),
        "--out",
        p(&corpus),
    ]);
    // no editor reaches the threshold, so the sample is empty
    let out = forensics(&[
        "regress",
        "--corpus",
        p(&corpus),
        "--model",
        "I",
        "--min-n",
        "100000",
        "--out",
        p(&dir.path().join("fit.json")),
    ]);
    assert_eq!(code(&out), 8, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regress"));
}
