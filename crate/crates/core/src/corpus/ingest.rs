//! JSONL corpus ingestion with per-line diagnostics.
//!
//! `articles.jsonl` holds one article per line:
//!
//! ```text
//! {"doi":..., "editor_id":..., "received":"YYYY-MM-DD", "accepted":"YYYY-MM-DD",
//!  "year":2012, "authors":[{"surname":..,"initial":..}], "keywords":[..],
//!  "top_level_classes":[1,2], "references":[[{"surname":..,"initial":..}],[]],
//!  "citation_count":17}
//! ```
//!
//! `editors.jsonl` holds `{"editor_id":..., "surname":..., "initial":...}`.
//! Invalid lines are dropped and reported; valid lines keep their order.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{Map, Value};

use super::{
    default_census_date, validate_article, ArticleRecord, AuthorName, Corpus, EditorIdentity,
    ReferenceEntry, TopClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFile {
    Articles,
    Editors,
}

impl fmt::Display for InputFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFile::Articles => "articles",
            InputFile::Editors => "editors",
        })
    }
}

/// A rejected input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: InputFile,
    /// 1-based line number.
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)?;
        if let Some(field) = &self.field {
            write!(f, " [{field}]")?;
        }
        write!(f, " {}", self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open { path: PathBuf, source: io::Error },
    #[error("{file}:{line}: read error: {source}")]
    Read {
        file: InputFile,
        line: usize,
        source: io::Error,
    },
    #[error("no valid editors ({rejected} lines rejected)")]
    NoEditors { rejected: usize },
    #[error("no valid articles ({rejected} lines rejected)")]
    NoArticles { rejected: usize },
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub census_date: NaiveDate,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            census_date: default_census_date(),
        }
    }
}

#[derive(Debug)]
pub struct Ingested {
    pub corpus: Corpus,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn ingest(
    articles: &Path,
    editors: &Path,
    options: &IngestOptions,
) -> Result<Ingested, IngestError> {
    let open = |path: &Path| {
        File::open(path)
            .map(BufReader::new)
            .map_err(|source| IngestError::Open {
                path: path.to_path_buf(),
                source,
            })
    };
    ingest_readers(open(articles)?, open(editors)?, options)
}

pub fn ingest_readers<A: BufRead, E: BufRead>(
    articles: A,
    editors: E,
    options: &IngestOptions,
) -> Result<Ingested, IngestError> {
    let mut diagnostics = Vec::new();

    let mut editor_list: Vec<EditorIdentity> = Vec::new();
    let mut editor_ids: HashSet<String> = HashSet::new();
    let mut editor_lines = 0;
    for (i, line) in editors.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| IngestError::Read {
            file: InputFile::Editors,
            line: line_no,
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        editor_lines += 1;
        let reject = |field: Option<&str>, message: String| Diagnostic {
            file: InputFile::Editors,
            line: line_no,
            field: field.map(str::to_string),
            message,
        };
        match parse_editor(&line) {
            Ok(editor) => {
                if editor_ids.contains(&editor.editor_id) {
                    diagnostics.push(reject(
                        Some("editor_id"),
                        format!("duplicate editor id `{}`", editor.editor_id),
                    ));
                } else {
                    editor_ids.insert(editor.editor_id.clone());
                    editor_list.push(editor);
                }
            }
            Err(e) => diagnostics.push(reject(e.field.as_deref(), e.message)),
        }
    }
    if editor_list.is_empty() {
        return Err(IngestError::NoEditors {
            rejected: editor_lines,
        });
    }

    let mut records = Vec::new();
    let mut dois: HashSet<String> = HashSet::new();
    let mut article_lines = 0;
    for (i, line) in articles.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| IngestError::Read {
            file: InputFile::Articles,
            line: line_no,
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        article_lines += 1;
        let reject = |field: &str, message: String| Diagnostic {
            file: InputFile::Articles,
            line: line_no,
            field: Some(field.to_string()),
            message,
        };
        let article = match parse_article(&line) {
            Ok(a) => a,
            Err(e) => {
                diagnostics.push(Diagnostic {
                    file: InputFile::Articles,
                    line: line_no,
                    field: e.field,
                    message: e.message,
                });
                continue;
            }
        };
        if !editor_ids.contains(&article.editor_id) {
            diagnostics.push(reject(
                "editor_id",
                format!("editor `{}` is not in the editor list", article.editor_id),
            ));
            continue;
        }
        if let Err(message) = validate_article(&article, options.census_date) {
            let field = if message.starts_with("authors") || message.contains("no authors") {
                "authors"
            } else {
                "accepted"
            };
            diagnostics.push(reject(field, message));
            continue;
        }
        if !dois.insert(article.doi.clone()) {
            diagnostics.push(reject("doi", format!("duplicate doi `{}`", article.doi)));
            continue;
        }
        records.push(article);
    }
    if records.is_empty() {
        return Err(IngestError::NoArticles {
            rejected: article_lines,
        });
    }

    let corpus = Corpus::new(records, editor_list, options.census_date)
        .expect("records were validated line by line");
    Ok(Ingested {
        corpus,
        diagnostics,
    })
}

#[derive(Debug)]
struct FieldError {
    field: Option<String>,
    message: String,
}

impl FieldError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

type FieldResult<T> = Result<T, FieldError>;

fn parse_object(line: &str) -> FieldResult<Map<String, Value>> {
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(FieldError {
            field: None,
            message: "line is not a JSON object".into(),
        }),
        Err(e) => Err(FieldError {
            field: None,
            message: format!("malformed JSON: {e}"),
        }),
    }
}

fn get<'a>(obj: &'a Map<String, Value>, field: &str) -> FieldResult<&'a Value> {
    obj.get(field)
        .ok_or_else(|| FieldError::at(field, "missing field"))
}

fn string_field(obj: &Map<String, Value>, field: &str) -> FieldResult<String> {
    match get(obj, field)? {
        Value::String(s) if !s.trim().is_empty() => Ok(s.clone()),
        Value::String(_) => Err(FieldError::at(field, "empty string")),
        other => Err(FieldError::at(field, format!("expected string, got {other}"))),
    }
}

fn date_field(obj: &Map<String, Value>, field: &str) -> FieldResult<NaiveDate> {
    let raw = string_field(obj, field)?;
    NaiveDate::parse_from_str(&raw, "%Y-%m-%d")
        .map_err(|e| FieldError::at(field, format!("invalid date `{raw}`: {e}")))
}

fn array_field<'a>(obj: &'a Map<String, Value>, field: &str) -> FieldResult<&'a Vec<Value>> {
    match get(obj, field)? {
        Value::Array(items) => Ok(items),
        other => Err(FieldError::at(field, format!("expected array, got {other}"))),
    }
}

fn parse_name(value: &Value, field: &str) -> FieldResult<AuthorName> {
    let obj = value
        .as_object()
        .ok_or_else(|| FieldError::at(field, "expected {surname, initial} object"))?;
    let surname = match obj.get("surname") {
        Some(Value::String(s)) => s.clone(),
        _ => return Err(FieldError::at(format!("{field}.surname"), "expected string")),
    };
    let initial = match obj.get("initial") {
        Some(Value::String(s)) => s.clone(),
        None | Some(Value::Null) => String::new(),
        _ => return Err(FieldError::at(format!("{field}.initial"), "expected string")),
    };
    Ok(AuthorName { surname, initial })
}

fn parse_editor(line: &str) -> FieldResult<EditorIdentity> {
    let obj = parse_object(line)?;
    let editor_id = string_field(&obj, "editor_id")?;
    let name = parse_name(&Value::Object(obj.clone()), "editor")?;
    EditorIdentity::new(editor_id, name)
        .ok_or_else(|| FieldError::at("surname", "surname is empty after normalization"))
}

fn parse_article(line: &str) -> FieldResult<ArticleRecord> {
    let obj = parse_object(line)?;
    let doi = string_field(&obj, "doi")?;
    let editor_id = string_field(&obj, "editor_id")?;
    let received = date_field(&obj, "received")?;
    let accepted = date_field(&obj, "accepted")?;
    let year = get(&obj, "year")?
        .as_i64()
        .and_then(|y| i32::try_from(y).ok())
        .ok_or_else(|| FieldError::at("year", "expected integer year"))?;

    let authors = array_field(&obj, "authors")?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_name(v, &format!("authors[{i}]")))
        .collect::<FieldResult<Vec<_>>>()?;

    let keywords = array_field(&obj, "keywords")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| FieldError::at(format!("keywords[{i}]"), "expected string"))
        })
        .collect::<FieldResult<Vec<_>>>()?;

    let top_level_classes = array_field(&obj, "top_level_classes")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .and_then(|n| u8::try_from(n).ok())
                .and_then(TopClass::from_index)
                .ok_or_else(|| {
                    FieldError::at(
                        format!("top_level_classes[{i}]"),
                        "expected class index 1..=10",
                    )
                })
        })
        .collect::<FieldResult<Vec<_>>>()?;

    let references = array_field(&obj, "references")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let field = format!("references[{i}]");
            let items = v
                .as_array()
                .ok_or_else(|| FieldError::at(field.clone(), "expected array of names"))?;
            let authors = items
                .iter()
                .enumerate()
                .map(|(j, n)| parse_name(n, &format!("{field}[{j}]")))
                .collect::<FieldResult<Vec<_>>>()?;
            Ok(ReferenceEntry { authors })
        })
        .collect::<FieldResult<Vec<_>>>()?;

    let citation_count = get(&obj, "citation_count")?
        .as_u64()
        .ok_or_else(|| FieldError::at("citation_count", "expected non-negative integer"))?;

    Ok(ArticleRecord {
        doi,
        editor_id,
        received,
        accepted,
        year,
        authors,
        keywords,
        top_level_classes,
        references,
        citation_count,
    })
}

/// Writes one JSON object per line in the canonical field order.
pub fn write_articles_jsonl<W: Write>(articles: &[ArticleRecord], mut out: W) -> io::Result<()> {
    for article in articles {
        serde_json::to_writer(&mut out, article)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EditorLine<'a> {
    editor_id: &'a str,
    surname: &'a str,
    initial: &'a str,
}

pub fn write_editors_jsonl<W: Write>(editors: &[EditorIdentity], mut out: W) -> io::Result<()> {
    for e in editors {
        let line = EditorLine {
            editor_id: &e.editor_id,
            surname: &e.name.surname,
            initial: &e.name.initial,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EDITORS: &str = r#"{"editor_id":"e1","surname":"Perc","initial":"M"}
{"editor_id":"e2","surname":"Uversky","initial":"V"}
"#;

    fn line(doi: &str, editor: &str, received: &str, accepted: &str) -> String {
        format!(
            r#"{{"doi":"{doi}","editor_id":"{editor}","received":"{received}","accepted":"{accepted}","year":2012,"authors":[{{"surname":"Doe","initial":"J"}}],"keywords":["Alleles"],"top_level_classes":[1,2],"references":[[{{"surname":"Perc","initial":"M"}}],[]],"citation_count":4}}"#
        )
    }

    fn run(articles: &str) -> Result<Ingested, IngestError> {
        ingest_readers(
            articles.as_bytes(),
            EDITORS.as_bytes(),
            &IngestOptions::default(),
        )
    }

    #[test]
    fn three_well_formed_lines() {
        let text = [
            line("d1", "e1", "2012-01-01", "2012-03-01"),
            line("d2", "e2", "2012-01-01", "2012-03-01"),
            line("d3", "e1", "2012-02-01", "2012-04-01"),
        ]
        .join("\n");
        let ingested = run(&text).unwrap();
        assert_eq!(ingested.corpus.len(), 3);
        assert!(ingested.diagnostics.is_empty());
        let a = &ingested.corpus.articles()[0];
        assert_eq!(a.references.len(), 2);
        assert_eq!(a.top_level_classes, vec![TopClass::BiologyLifeSciences, TopClass::MedicineHealthSciences]);
    }

    #[test]
    fn accepted_before_received_is_rejected() {
        let text = [
            line("d1", "e1", "2012-01-01", "2012-03-01"),
            line("d2", "e1", "2012-05-01", "2012-03-01"),
            line("d3", "e2", "2012-01-01", "2012-03-01"),
        ]
        .join("\n");
        let ingested = run(&text).unwrap();
        assert_eq!(ingested.corpus.len(), 2);
        assert_eq!(ingested.diagnostics.len(), 1);
        let d = &ingested.diagnostics[0];
        assert_eq!(d.line, 2);
        assert_eq!(d.field.as_deref(), Some("accepted"));
        let dois: Vec<_> = ingested.corpus.articles().iter().map(|a| a.doi.as_str()).collect();
        assert_eq!(dois, ["d1", "d3"]);
    }

    #[test]
    fn dangling_editor_and_malformed_fields() {
        let mut bad_count = line("d4", "e1", "2012-01-01", "2012-03-01");
        bad_count = bad_count.replace("\"citation_count\":4", "\"citation_count\":-4");
        let text = [
            line("d1", "e9", "2012-01-01", "2012-03-01"),
            "{not json".to_string(),
            line("d3", "e1", "2012-01-01", "2012-03-01").replace("\"received\":\"2012-01-01\",", ""),
            bad_count,
            line("d5", "e1", "2012-01-01", "2012-03-01"),
        ]
        .join("\n");
        let ingested = run(&text).unwrap();
        assert_eq!(ingested.corpus.len(), 1);
        let fields: Vec<_> = ingested
            .diagnostics
            .iter()
            .map(|d| (d.line, d.field.clone()))
            .collect();
        assert_eq!(
            fields,
            vec![
                (1, Some("editor_id".to_string())),
                (2, None),
                (3, Some("received".to_string())),
                (4, Some("citation_count".to_string())),
            ]
        );
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(run(""), Err(IngestError::NoArticles { rejected: 0 })));
    }

    #[test]
    fn reserialization_is_byte_stable() {
        let text = [
            line("d1", "e1", "2012-01-01", "2012-03-01"),
            line("d2", "e2", "2012-01-01", "2012-03-01"),
        ]
        .join("\n")
            + "\n";
        let ingested = run(&text).unwrap();
        let mut out = Vec::new();
        write_articles_jsonl(ingested.corpus.articles(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
        let mut eds = Vec::new();
        write_editors_jsonl(ingested.corpus.editors(), &mut eds).unwrap();
        assert_eq!(String::from_utf8(eds).unwrap(), EDITORS);
    }
}
