//! Report artifacts: stage tables, fit tables, figure data and the summary.
//!
//! Every artifact is rendered to a string in memory, so a [`Bundle`] can be
//! compared byte for byte before it is written. Floating-point values in CSV
//! files use fixed notation with [`DECIMALS`] places; JSON numbers are
//! rounded to the same number of places and printed in shortest form.
//! Missing values are written as `NA` in CSV and `null` in JSON.
//!
//! Figure-data files open with `# figure: <panel>` and `# <description>`
//! comment lines followed by a CSV header.

mod figures;
mod summary;
mod tables;

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::econometrics::{FitError, ModelVariant};
use crate::pipeline::Analysis;
use crate::renumeration::{rate_tests, RenumerationRecord};

pub use figures::{figure_files, metric_figure_files};
pub use summary::{summarize, ModelSummary, Summary};
pub use tables::{
    blacklist_txt, classes_csv, fit_json, fit_table_csv, impact_csv, profiles_csv, renumeration_csv,
    scatter_csv, ties_csv, FitReport,
};

/// Decimal places of every formatted float.
pub const DECIMALS: usize = 8;

/// Number of editors in the fig1-a rank table.
pub const RANK_TABLE_SIZE: usize = 100;

/// Fixed-point rendering with [`DECIMALS`] places; `NA` for non-finite
/// values. Negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    let s = format!("{x:.DECIMALS$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), fmt_f64)
}

fn round_value(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = fmt_f64(x).parse().expect("formatted float parses");
            *value = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to [`DECIMALS`] places.
pub fn to_fixed_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// Artifacts keyed by relative path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bundle {
    pub files: BTreeMap<String, String>,
}

impl Bundle {
    pub fn insert(&mut self, path: impl Into<String>, content: String) {
        self.files.insert(path.into(), content);
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    /// Writes every artifact below `dir`, creating subdirectories.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        for (rel, content) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, content)?;
        }
        Ok(())
    }
}

/// Fits the given model variants; a failed fit is kept as its error.
pub fn fit_all(analysis: &Analysis, variants: &[ModelVariant]) -> BTreeMap<ModelVariant, Result<FitReport, FitError>> {
    variants
        .iter()
        .map(|&v| (v, analysis.fit(v).map(|fit| FitReport::new(v, fit))))
        .collect()
}

/// The ΔC rate comparison as JSON; `null` when too few editors are eligible.
pub fn tests_json(records: &[RenumerationRecord]) -> String {
    to_fixed_json(&rate_tests(records).ok())
}

/// The full report: stage tables, fits, figure data and `summary.json`.
pub fn build_bundle(analysis: &Analysis) -> Bundle {
    build_bundle_with(analysis, &ModelVariant::ALL)
}

/// [`build_bundle`] restricted to some model variants. Tables and figures
/// of variants left out show them as not fitted.
pub fn build_bundle_with(analysis: &Analysis, variants: &[ModelVariant]) -> Bundle {
    let fits = fit_all(analysis, variants);
    let records = analysis.renumeration();
    let mut bundle = Bundle::default();
    bundle.insert("classes.csv", classes_csv(analysis));
    bundle.insert("impact.csv", impact_csv(analysis));
    bundle.insert("profiles.csv", profiles_csv(analysis));
    bundle.insert("ties.csv", ties_csv(analysis));
    bundle.insert("blacklist.txt", blacklist_txt(&analysis.blacklist));
    bundle.insert("renum.csv", renumeration_csv(&records));
    for (variant, fit) in &fits {
        bundle.insert(format!("fits/{}.json", variant.as_str()), fit_json(*variant, fit));
    }
    bundle.insert(
        "table1.csv",
        fit_table_csv(&fits, &[ModelVariant::I, ModelVariant::IRtau, ModelVariant::ITop10]),
    );
    bundle.insert("table2.csv", fit_table_csv(&fits, &[ModelVariant::II, ModelVariant::IIFxr]));
    for (name, content) in figure_files(analysis, &fits, &records) {
        bundle.insert(name, content);
    }
    let summary = summarize(analysis, &fits, &records);
    bundle.insert("tests.json", tests_json(&records));
    bundle.insert("summary.json", to_fixed_json(&summary));
    bundle
}
