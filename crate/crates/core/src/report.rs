//! Metric reports: a canonical JSON form plus CSV and markdown renderings
//! shaped like the familiar evaluation tables (concepts as columns, models as
//! rows; transition tables as relation/domain/range/score).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::categorization::MatchMode;
use crate::embedding::CompositionMode;
use crate::error::{Error, Result};
use crate::hierarchy::{CorrelationKind, SimilarityMethod};
use crate::kg::TypingMode;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Categorization,
    Coherence,
    SemanticError,
    Relatedness,
    Transition,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Task::Categorization => "categorization",
            Task::Coherence => "coherence",
            Task::SemanticError => "semantic_error",
            Task::Relatedness => "relatedness",
            Task::Transition => "transition",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidInput(format!(
                "unknown report format `{other}` (expected json, csv, or markdown)"
            ))),
        }
    }
}

/// Everything needed to reproduce a run, echoed verbatim into every report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub dataset_label: String,
    pub model_label: String,
    pub embedding_source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kg_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition_mode: Option<CompositionMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub typing_mode: Option<TypingMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub match_mode: Option<MatchMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub similarity_method: Option<SimilarityMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_source: Option<String>,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn new(id: impl Into<String>) -> Self {
        ReportRow { id: id.into(), values: BTreeMap::new(), error: None }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), value.into());
        self
    }

    pub fn with_error(mut self, error: impl Into<String>) -> Self {
        self.error = Some(error.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema_version: u32,
    pub task: Task,
    pub run_meta: RunMeta,
    /// Wall-clock timestamp, kept apart from the reproducible content.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    /// Value-column order for tabular renderings.
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, Value>,
}

impl MetricReport {
    pub fn new(task: Task, run_meta: RunMeta, columns: Vec<&str>) -> Self {
        MetricReport {
            schema_version: SCHEMA_VERSION,
            task,
            run_meta,
            generated_at: None,
            columns: columns.into_iter().map(str::to_string).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    pub fn has_row_errors(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    /// The report with the timestamp cleared, for determinism comparisons.
    pub fn without_timestamp(&self) -> MetricReport {
        MetricReport { generated_at: None, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("invalid report JSON: {e}")))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_csv(&self) -> String {
        let with_error = self.rows.iter().any(|r| r.error.is_some());
        let mut out = String::new();
        let mut header: Vec<String> = vec!["id".to_string()];
        header.extend(self.columns.iter().cloned());
        if with_error {
            header.push("error".to_string());
        }
        out.push_str(&csv_line(&header));
        for row in &self.rows {
            let mut fields: Vec<String> = vec![row.id.clone()];
            for col in &self.columns {
                fields.push(row.values.get(col).map(render_value).unwrap_or_default());
            }
            if with_error {
                fields.push(row.error.clone().unwrap_or_default());
            }
            out.push_str(&csv_line(&fields));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        match self.task {
            Task::Categorization | Task::Coherence => self.markdown_concept_columns(),
            Task::Transition => self.markdown_transition(),
            Task::SemanticError => self.markdown_matrix(),
            Task::Relatedness => self.markdown_relatedness(),
        }
    }

    /// Paper-style layout: one column per concept, one row per model.
    fn markdown_concept_columns(&self) -> String {
        let mut out = String::new();
        let mut header = vec!["Source".to_string(), "Model".to_string()];
        header.extend(self.rows.iter().map(|r| r.id.clone()));
        push_md_row(&mut out, &header);
        push_md_separator(&mut out, header.len());
        let mut data = vec![self.run_meta.dataset_label.clone(), self.run_meta.model_label.clone()];
        for row in &self.rows {
            data.push(match (&row.error, row.values.get("score")) {
                (None, Some(v)) => render_score(v),
                _ => "n/a".to_string(),
            });
        }
        push_md_row(&mut out, &data);
        out
    }

    fn markdown_transition(&self) -> String {
        let mut out = String::new();
        let header = vec![
            "Relation".to_string(),
            "Domain".to_string(),
            "Range".to_string(),
            self.run_meta.model_label.clone(),
        ];
        push_md_row(&mut out, &header);
        push_md_separator(&mut out, header.len());
        for row in &self.rows {
            let cell = |key: &str| {
                row.values
                    .get(key)
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .unwrap_or_else(|| "n/a".to_string())
            };
            let score = match (&row.error, row.values.get("score")) {
                (None, Some(v)) => render_score(v),
                _ => "n/a".to_string(),
            };
            push_md_row(&mut out, &[row.id.clone(), cell("domain"), cell("range"), score]);
        }
        out
    }

    fn markdown_matrix(&self) -> String {
        let mut out = String::new();
        let mut header = vec![String::new()];
        header.extend(self.columns.iter().cloned());
        push_md_row(&mut out, &header);
        push_md_separator(&mut out, header.len());
        for row in &self.rows {
            let mut data = vec![row.id.clone()];
            for col in &self.columns {
                data.push(match row.values.get(col) {
                    Some(Value::Null) | None => "n/a".to_string(),
                    Some(v) => render_score(v),
                });
            }
            push_md_row(&mut out, &data);
        }
        if let (Some(mean), Some(max)) = (self.summary.get("mean"), self.summary.get("max")) {
            out.push_str(&format!(
                "\nmean {} / max {} over computed pairs\n",
                render_score(mean),
                render_score(max)
            ));
        }
        out
    }

    fn markdown_relatedness(&self) -> String {
        let mut out = String::new();
        let header = vec![
            "Source".to_string(),
            "Model".to_string(),
            "Correlation".to_string(),
            "Pairs used".to_string(),
            "Pairs dropped".to_string(),
        ];
        push_md_row(&mut out, &header);
        push_md_separator(&mut out, header.len());
        for row in &self.rows {
            let value = |key: &str| row.values.get(key).map(render_value).unwrap_or_default();
            let correlation = match (&row.error, row.values.get("correlation")) {
                (None, Some(v)) => render_score(v),
                _ => "n/a".to_string(),
            };
            push_md_row(
                &mut out,
                &[
                    self.run_meta.dataset_label.clone(),
                    self.run_meta.model_label.clone(),
                    correlation,
                    value("n_used"),
                    value("n_dropped"),
                ],
            );
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render(format)).map_err(|e| Error::io(path, e))
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render_score(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.3}"),
        None => render_value(v),
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut out = String::new();
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if field.contains([',', '"', '\n']) {
            out.push('"');
            out.push_str(&field.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(field);
        }
    }
    out.push('\n');
    out
}

fn push_md_row(out: &mut String, cells: &[String]) {
    out.push('|');
    for cell in cells {
        out.push(' ');
        out.push_str(&cell.replace('|', "\\|"));
        out.push_str(" |");
    }
    out.push('\n');
}

fn push_md_separator(out: &mut String, n: usize) {
    out.push('|');
    for _ in 0..n {
        out.push_str(" --- |");
    }
    out.push('\n');
}
