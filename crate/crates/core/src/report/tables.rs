use std::collections::BTreeMap;

use serde::Serialize;

use super::{fmt_f64, fmt_opt, to_fixed_json};
use crate::econometrics::{
    marginal_effects, Coefficient, CoefficientKind, FitError, FitResult, Margins, ModelVariant,
};
use crate::editor_metrics::duration_band;
use crate::pipeline::Analysis;
use crate::renumeration::RenumerationRecord;
use crate::social::SurnameBlacklist;

pub(super) fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

fn opt_index<T>(x: Option<T>, f: impl Fn(T) -> u8) -> String {
    x.map_or_else(|| "NA".into(), |v| f(v).to_string())
}

/// `doi, top_ranked, principal_class, refined_sa`; classes as 1-based indices.
pub fn classes_csv(analysis: &Analysis) -> String {
    let rows = analysis.corpus.articles().iter().zip(&analysis.classes).map(|(a, c)| {
        vec![
            a.doi.clone(),
            opt_index(c.top_ranked, |t| t.index()),
            opt_index(c.principal, |t| t.index()),
            opt_index(c.refined, |s| s.index()),
        ]
    });
    csv_string(&["doi", "top_ranked", "principal_class", "refined_sa"], rows)
}

/// `doi, s, t, z, excluded_flag`; the flag is empty for sample articles.
pub fn impact_csv(analysis: &Analysis) -> String {
    let rows = analysis.corpus.articles().iter().zip(&analysis.impact.scores).map(|(a, s)| {
        vec![
            a.doi.clone(),
            opt_index(s.s, |s| s.index()),
            s.t.to_string(),
            fmt_opt(s.z),
            s.excluded.map_or(String::new(), |e| e.as_str().to_string()),
        ]
    });
    csv_string(&["doi", "s", "t", "z", "excluded_flag"], rows)
}

/// One row per editor profile with power, activity, citation and tie measures.
pub fn profiles_csv(analysis: &Analysis) -> String {
    let rows = analysis
        .metrics
        .profiles
        .iter()
        .zip(&analysis.ties.editors)
        .map(|(p, t)| {
            vec![
                p.editor_id.clone(),
                p.n_articles.to_string(),
                p.service_days.to_string(),
                fmt_f64(p.turnover_days),
                fmt_f64(p.mean_duration),
                fmt_opt(p.cov_duration),
                duration_band(p.mean_duration).to_string(),
                p.editor_citations.to_string(),
                p.total_references.to_string(),
                fmt_f64(p.f),
                flag(p.degenerate),
                flag(p.top10),
                t.repeat_authors.to_string(),
                t.repeat_articles.to_string(),
                fmt_f64(t.rho),
            ]
        });
    csv_string(
        &[
            "editor_id",
            "n_articles",
            "service_days",
            "turnover_days",
            "mean_duration",
            "cov_duration",
            "duration_band",
            "editor_citations",
            "total_references",
            "f",
            "degenerate",
            "top10",
            "repeat_authors",
            "repeat_articles",
            "rho",
        ],
        rows,
    )
}

/// `doi, editor_id, R`.
pub fn ties_csv(analysis: &Analysis) -> String {
    let rows = analysis
        .corpus
        .articles()
        .iter()
        .zip(&analysis.ties.r)
        .map(|(a, &r)| vec![a.doi.clone(), a.editor_id.clone(), flag(r)]);
    csv_string(&["doi", "editor_id", "R"], rows)
}

pub fn blacklist_txt(blacklist: &SurnameBlacklist) -> String {
    let mut out = Vec::new();
    blacklist.write(&mut out).expect("in-memory write");
    String::from_utf8(out).expect("surnames are utf-8")
}

/// One row per renumeration record.
pub fn renumeration_csv(records: &[RenumerationRecord]) -> String {
    let rows = records.iter().map(|r| {
        vec![
            r.editor_id.clone(),
            r.n_articles.to_string(),
            flag(r.degenerate),
            r.refs_repeat.to_string(),
            r.refs_other.to_string(),
            r.cites_repeat.to_string(),
            r.cites_other.to_string(),
            r.total_references.to_string(),
            r.editor_citations.to_string(),
            fmt_opt(r.f1),
            fmt_opt(r.f0),
            fmt_opt(r.delta_c),
            r.trend.n.to_string(),
            fmt_opt(r.trend.slope),
            fmt_opt(r.trend.std_error),
            fmt_opt(r.trend.p_value),
            r.trend.class.as_str().to_string(),
        ]
    });
    csv_string(
        &[
            "editor_id",
            "n_articles",
            "degenerate",
            "refs_repeat",
            "refs_other",
            "cites_repeat",
            "cites_other",
            "total_references",
            "editor_citations",
            "f1",
            "f0",
            "delta_c",
            "trend_n",
            "trend_slope",
            "trend_std_error",
            "trend_p_value",
            "trend_class",
        ],
        rows,
    )
}

/// Plot-ready N_E, C_E and trend class per renumeration record.
pub fn scatter_csv(records: &[RenumerationRecord]) -> String {
    let body = csv_string(
        &["editor_id", "n_articles", "editor_citations", "trend_class", "degenerate"],
        records.iter().map(|r| {
            vec![
                r.editor_id.clone(),
                r.n_articles.to_string(),
                r.editor_citations.to_string(),
                r.trend.class.as_str().to_string(),
                flag(r.degenerate),
            ]
        }),
    );
    format!("# figure: fig3-c\n# editor power, editor citations and impact trend class\n{body}")
}

/// A fit as reported: estimates and fit statistics without residuals, plus
/// the plotted marginal effects for variants with an interaction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: ModelVariant,
    pub dependent: String,
    pub sample: String,
    pub coefficients: Vec<Coefficient>,
    pub dropped: Vec<String>,
    pub covariance: Vec<Vec<f64>>,
    pub n_obs: usize,
    pub n_clusters: usize,
    pub df_model: usize,
    pub df_resid: usize,
    pub r2_within: f64,
    pub adj_r2_within: f64,
    pub f_stat: Option<f64>,
    pub f_p_value: Option<f64>,
    pub mean_dependent: f64,
    pub sd_dependent: f64,
    pub mean_dependent_raw: f64,
    pub diagnostics: Vec<String>,
    pub margins: Option<Margins>,
    pub margins_error: Option<String>,
}

impl FitReport {
    pub fn new(variant: ModelVariant, fit: FitResult) -> Self {
        let (margins, margins_error) = match variant.margins_request(&fit) {
            Some(req) => match marginal_effects(&fit, &req) {
                Ok(m) => (Some(m), None),
                Err(e) => (None, Some(e.to_string())),
            },
            None => (None, None),
        };
        Self {
            model: variant,
            dependent: fit.dependent,
            sample: fit.sample,
            coefficients: fit.coefficients,
            dropped: fit.dropped,
            covariance: fit.covariance,
            n_obs: fit.n_obs,
            n_clusters: fit.n_clusters,
            df_model: fit.df_model,
            df_resid: fit.df_resid,
            r2_within: fit.r2_within,
            adj_r2_within: fit.adj_r2_within,
            f_stat: fit.f_stat,
            f_p_value: fit.f_p_value,
            mean_dependent: fit.mean_dependent,
            sd_dependent: fit.sd_dependent,
            mean_dependent_raw: fit.mean_dependent_raw,
            diagnostics: fit.diagnostics,
            margins,
            margins_error,
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    fn has_dummies(&self, variable: &str) -> bool {
        self.coefficients
            .iter()
            .any(|c| matches!(&c.kind, CoefficientKind::Dummy { variable: v, .. } if v == variable))
    }
}

#[derive(Serialize)]
struct FitFailure<'a> {
    model: ModelVariant,
    error: &'a str,
}

pub fn fit_json(variant: ModelVariant, fit: &Result<FitReport, FitError>) -> String {
    match fit {
        Ok(report) => to_fixed_json(report),
        Err(e) => to_fixed_json(&FitFailure {
            model: variant,
            error: &e.to_string(),
        }),
    }
}

/// Regression table: one row per reported coefficient (dummies summarized),
/// then N, clusters, R², F and df; four columns per model.
pub fn fit_table_csv(fits: &BTreeMap<ModelVariant, Result<FitReport, FitError>>, variants: &[ModelVariant]) -> String {
    let mut header = vec!["row".to_string()];
    for v in variants {
        let s = v.as_str();
        header.extend([s.to_string(), format!("{s}_se"), format!("{s}_p"), format!("{s}_std")]);
    }
    let ok: Vec<Option<&FitReport>> = variants.iter().map(|v| fits.get(v).and_then(|f| f.as_ref().ok())).collect();

    let mut names: Vec<String> = Vec::new();
    for fit in ok.iter().flatten() {
        for c in &fit.coefficients {
            let shown = !matches!(c.kind, CoefficientKind::Dummy { .. } | CoefficientKind::Constant);
            if shown && !names.contains(&c.name) {
                names.push(c.name.clone());
            }
        }
    }
    names.push("_cons".into());

    let blank = || vec![String::new(); 4];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for name in &names {
        let mut row = vec![name.clone()];
        for fit in &ok {
            match fit.and_then(|f| f.coefficient(name)) {
                Some(c) => row.extend([
                    fmt_f64(c.estimate),
                    fmt_f64(c.std_error),
                    fmt_f64(c.p_value),
                    fmt_opt(c.standardized),
                ]),
                None => row.extend(blank()),
            }
        }
        rows.push(row);
    }
    let stat = |label: &str, f: &dyn Fn(&FitReport) -> String| {
        let mut row = vec![label.to_string()];
        for fit in &ok {
            let mut cells = blank();
            cells[0] = fit.map_or_else(|| "NA".into(), f);
            row.extend(cells);
        }
        row
    };
    let yes_no = |b: bool| if b { "yes" } else { "no" }.to_string();
    rows.push(stat("year_dummies", &|f| yes_no(f.has_dummies("year"))));
    rows.push(stat("sa_dummies", &|f| yes_no(f.has_dummies("sa"))));
    rows.push(stat("n_obs", &|f| f.n_obs.to_string()));
    rows.push(stat("n_clusters", &|f| f.n_clusters.to_string()));
    rows.push(stat("r2_within", &|f| fmt_f64(f.r2_within)));
    rows.push(stat("adj_r2_within", &|f| fmt_f64(f.adj_r2_within)));
    rows.push(stat("f_stat", &|f| fmt_opt(f.f_stat)));
    rows.push(stat("f_p_value", &|f| fmt_opt(f.f_p_value)));
    rows.push(stat("df_model", &|f| f.df_model.to_string()));
    rows.push(stat("df_resid", &|f| f.df_resid.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(&header, rows)
}
