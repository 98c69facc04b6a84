use std::collections::BTreeMap;

use super::tables::{csv_string, scatter_csv, FitReport};
use super::{fmt_f64, fmt_opt, RANK_TABLE_SIZE};
use crate::econometrics::{FitError, Margins, ModelVariant};
use crate::editor_metrics::{
    distribution_tables, histogram, lorenz_gini, rank_table, Bin, DistributionPanel, DEFAULT_BINS,
};
use crate::impact::{stratum_normality_report, DEFAULT_KS_THRESHOLD};
use crate::pipeline::Analysis;
use crate::renumeration::{
    delta_c_distribution, eligible, power_law_fit, RenumerationRecord, TrendClass,
};
use crate::taxonomy::{sa_histogram, HistogramStage};

/// Editors dropped from each power-law fit, largest N_E first.
pub const POWER_LAW_EXCLUDED: usize = 2;

fn with_header(figure: &str, description: &str, notes: &[String], body: String) -> String {
    let mut out = format!("# figure: {figure}\n# {description}\n");
    for note in notes {
        out.push_str("# ");
        out.push_str(note);
        out.push('\n');
    }
    out.push_str(&body);
    out
}

fn bins_body(bins: &[Bin]) -> String {
    let total: u64 = bins.iter().map(|b| b.count).sum();
    csv_string(
        &["lower", "upper", "count", "probability"],
        bins.iter().map(|b| {
            vec![
                fmt_f64(b.lower),
                fmt_f64(b.upper),
                b.count.to_string(),
                fmt_f64(if total == 0 { 0.0 } else { b.count as f64 / total as f64 }),
            ]
        }),
    )
}

fn panel_file(panel: &DistributionPanel, min_n: usize) -> String {
    let mut notes = vec![format!("n: {}", panel.n), format!("mean: {}", fmt_opt(panel.mean))];
    if panel.filtered {
        notes.push(format!("editors with N_E >= {min_n}"));
    }
    with_header(panel.figure, &format!("distribution of {}", panel.name), &notes, bins_body(&panel.bins))
}

fn margins_file(figure: &str, variant: ModelVariant, fit: Option<&Result<FitReport, FitError>>) -> String {
    let header = ["branch", "moderator", "prediction", "std_error", "ci_low", "ci_high"];
    let description = format!("marginal predictions of model {variant} with 95% intervals");
    let margins: Result<&Margins, String> = match fit {
        None => Err("model not fitted".into()),
        Some(Err(e)) => Err(e.to_string()),
        Some(Ok(report)) => report
            .margins
            .as_ref()
            .ok_or_else(|| report.margins_error.clone().unwrap_or_else(|| "no margins".into())),
    };
    match margins {
        Err(reason) => with_header(figure, &description, &[format!("unavailable: {reason}")], csv_string(&header, [])),
        Ok(m) => {
            let mut notes = vec![format!("moderator: {}", m.moderator)];
            for s in &m.slopes {
                notes.push(format!(
                    "slope branch={} estimate={} se={} p={}",
                    fmt_opt(s.branch),
                    fmt_f64(s.slope),
                    fmt_f64(s.std_error),
                    fmt_f64(s.p_value)
                ));
            }
            if let Some(d) = &m.slope_difference {
                notes.push(format!(
                    "slope difference estimate={} se={} p={}",
                    fmt_f64(d.slope),
                    fmt_f64(d.std_error),
                    fmt_f64(d.p_value)
                ));
            }
            notes.extend(m.warnings.iter().map(|w| format!("warning: {w}")));
            let rows = m.points.iter().map(|p| {
                vec![
                    fmt_opt(p.branch),
                    fmt_f64(p.moderator),
                    fmt_f64(p.prediction),
                    fmt_f64(p.std_error),
                    fmt_f64(p.ci_low),
                    fmt_f64(p.ci_high),
                ]
            });
            with_header(figure, &description, &notes, csv_string(&header, rows))
        }
    }
}

fn rate_histograms(records: &[RenumerationRecord]) -> String {
    let (f0, f1): (Vec<f64>, Vec<f64>) = eligible(records)
        .map(|r| (r.f0.expect("eligible"), r.f1.expect("eligible")))
        .unzip();
    let mut pooled = f0.clone();
    pooled.extend(&f1);
    let edges = histogram(&pooled, DEFAULT_BINS);
    let count = |values: &[f64], i: usize| {
        let last = i + 1 == edges.len();
        values
            .iter()
            .filter(|&&v| v >= edges[i].lower && (v < edges[i].upper || (last && v <= edges[i].upper)))
            .count()
    };
    let rows = (0..edges.len()).map(|i| {
        vec![
            fmt_f64(edges[i].lower),
            fmt_f64(edges[i].upper),
            count(&f0, i).to_string(),
            count(&f1, i).to_string(),
        ]
    });
    with_header(
        "fig3-a",
        "distributions of the conditional editor citation rates f_E0 (R=0) and f_E1 (R=1)",
        &[format!("editors: {}", f0.len())],
        csv_string(&["lower", "upper", "count_r0", "count_r1"], rows),
    )
}

fn delta_c_file(records: &[RenumerationRecord]) -> String {
    let description = "distribution of the excess editor citations delta C_E";
    match delta_c_distribution(records) {
        Err(e) => with_header("fig3-b", description, &[format!("unavailable: {e}")], bins_body(&[])),
        Ok(d) => with_header(
            "fig3-b",
            description,
            &[
                format!("n: {}", d.n),
                format!("mean: {}", fmt_f64(d.mean)),
                format!("sd: {}", fmt_f64(d.sd)),
                format!("skewness: {}", fmt_f64(d.skewness)),
                format!("upper_threshold: {}", fmt_f64(d.upper_threshold)),
                format!("lower_threshold: {}", fmt_f64(d.lower_threshold)),
                format!("right_outliers: {}", d.right_outliers),
                format!("left_outliers: {}", d.left_outliers),
            ],
            bins_body(&d.bins),
        ),
    }
}

fn power_law_file(records: &[RenumerationRecord]) -> String {
    let rows = [TrendClass::Positive, TrendClass::Negative].into_iter().map(|class| {
        match power_law_fit(records, class, POWER_LAW_EXCLUDED) {
            Ok(f) => vec![
                class.as_str().to_string(),
                f.n_points.to_string(),
                f.excluded_zero.to_string(),
                f.excluded_top.to_string(),
                fmt_f64(f.gamma),
                fmt_f64(f.std_error),
                fmt_f64(f.intercept),
            ],
            Err(_) => {
                let mut row = vec![class.as_str().to_string()];
                row.extend(std::iter::repeat_n("NA".to_string(), 6));
                row
            }
        }
    });
    with_header(
        "fig3-c",
        "power-law fits log10 C_E = a + gamma log10 N_E per trend class",
        &[format!("largest {POWER_LAW_EXCLUDED} editors by N_E excluded per class")],
        csv_string(
            &["class", "n_points", "excluded_zero", "excluded_top", "gamma", "std_error", "intercept"],
            rows,
        ),
    )
}

/// The editor-metric figures: rank table, Lorenz curve and distributions.
pub fn metric_figure_files(analysis: &Analysis) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let profiles = &analysis.metrics.profiles;

    let ranks = rank_table(profiles, RANK_TABLE_SIZE);
    files.push((
        "fig1-a.csv".into(),
        with_header(
            "fig1-a",
            "most active editors ranked by N_E with mean acceptance time band",
            &[],
            csv_string(
                &["rank", "editor_id", "n_articles", "mean_duration", "band"],
                ranks.iter().map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.editor_id.clone(),
                        r.n_articles.to_string(),
                        fmt_f64(r.mean_duration),
                        r.band.to_string(),
                    ]
                }),
            ),
        ),
    ));

    let n_e: Vec<f64> = profiles.iter().map(|p| p.n_articles as f64).collect();
    let lorenz = match lorenz_gini(&n_e) {
        Ok(s) => with_header(
            "fig1-c",
            "Lorenz curve of N_E",
            &[format!("gini: {}", fmt_f64(s.gini))],
            csv_string(
                &["population_share", "article_share"],
                s.lorenz.iter().map(|(x, y)| vec![fmt_f64(*x), fmt_f64(*y)]),
            ),
        ),
        Err(e) => with_header(
            "fig1-c",
            "Lorenz curve of N_E",
            &[format!("unavailable: {e}")],
            csv_string(&["population_share", "article_share"], []),
        ),
    };
    files.push(("fig1-c.csv".into(), lorenz));

    let min_n = analysis.options.min_articles;
    let tables = distribution_tables(&analysis.corpus, &analysis.metrics, Some(&analysis.ties), min_n, DEFAULT_BINS);
    for panel in &tables.panels {
        files.push((format!("{}.csv", panel.figure), panel_file(panel, min_n)));
    }
    files
}

/// Every figure-data file, keyed by file name.
pub fn figure_files(
    analysis: &Analysis,
    fits: &BTreeMap<ModelVariant, Result<FitReport, FitError>>,
    records: &[RenumerationRecord],
) -> Vec<(String, String)> {
    let mut files = metric_figure_files(analysis);

    files.push(("fig2-a.csv".into(), margins_file("fig2-a", ModelVariant::IRtau, fits.get(&ModelVariant::IRtau))));
    files.push(("fig2-b.csv".into(), margins_file("fig2-b", ModelVariant::IIFxr, fits.get(&ModelVariant::IIFxr))));

    files.push(("fig3-a.csv".into(), rate_histograms(records)));
    files.push(("fig3-b.csv".into(), delta_c_file(records)));
    files.push(("fig3-c.csv".into(), scatter_csv(records)));
    files.push(("fig3-c-fits.csv".into(), power_law_file(records)));

    let stages = [
        ("figS1-a", HistogramStage::PreException, "articles per top-ranked class"),
        ("figS1-b", HistogramStage::PostException, "articles per principal class after the exception rule"),
        ("figS1-c", HistogramStage::Refined, "articles per refined subject area"),
    ];
    for (figure, stage, description) in stages {
        let h = sa_histogram(&analysis.classes, stage);
        let labels = h.labels();
        let rows = h
            .counts
            .iter()
            .enumerate()
            .map(|(i, c)| vec![(i + 1).to_string(), labels[i].to_string(), c.to_string()]);
        files.push((
            format!("{figure}.csv"),
            with_header(
                figure,
                description,
                &[format!("unresolved: {}", h.unresolved)],
                csv_string(&["index", "label", "count"], rows),
            ),
        ));
    }

    let normality = stratum_normality_report(&analysis.impact, DEFAULT_KS_THRESHOLD);
    files.push((
        "figS1-d.csv".into(),
        with_header(
            "figS1-d",
            "per-stratum distribution of z against N(0,1)",
            &[format!("ks threshold: {}", fmt_f64(DEFAULT_KS_THRESHOLD))],
            csv_string(
                &["s", "t", "n", "skewness", "excess_kurtosis", "ks_distance", "poor_convergence"],
                normality.iter().map(|r| {
                    vec![
                        r.key.s.index().to_string(),
                        r.key.t.to_string(),
                        r.n.to_string(),
                        fmt_f64(r.skewness),
                        fmt_f64(r.excess_kurtosis),
                        fmt_f64(r.ks_distance),
                        u8::from(r.poor_convergence).to_string(),
                    ]
                }),
            ),
        ),
    ));
    files
}
