//! Benchmark directory layouts.
//!
//! Factoid QA (`<root>/`):
//! * `test_human.json`, `test_augmented.json`: arrays of
//!   `{"imgname", "query", "label"}`
//! * chart content for `imgname` with stem `S`, first match wins:
//!   `svg/S.svg`, `annotations/S.json` (a serialized `ChartAnnotation`),
//!   `tables/S.csv` (header row, first column is the row label)
//!
//! Long-form QA: `<root>/test.json` (or the file itself), an array of
//! `{"id", "title", "question", "ocr": [..], "answer"}`.
//!
//! Summarization: `<root>/pew.json` / `<root>/statista.json` (or the file
//! itself), arrays of `{"id", "input", "summary"}` where `input` is in
//! Chart-to-Text form.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::config::Split;
use super::HarnessError;
use crate::chart_data::{parse_chart2text_input, Cell, ChartAnnotation, DataTable, Row};
use crate::prompt_kit::{CsSource, TaskKind};
use crate::vdt_builder::parse_svg_chart;

#[derive(Debug, Clone, PartialEq)]
pub enum ChartInput {
    Annotation(ChartAnnotation),
    Table(DataTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub split: Option<Split>,
    /// Text placed in the prompt's input slot.
    pub input: String,
    pub gold: String,
    pub chart: Option<ChartInput>,
}

#[derive(Deserialize)]
struct FcqaRecord {
    imgname: Option<String>,
    query: Option<String>,
    label: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct LcqaRecord {
    id: Option<serde_json::Value>,
    title: Option<String>,
    question: Option<String>,
    #[serde(default)]
    ocr: Vec<String>,
    answer: Option<String>,
}

#[derive(Deserialize)]
struct CsRecord {
    id: Option<serde_json::Value>,
    input: Option<String>,
    summary: Option<String>,
}

fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let values: Vec<serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| HarnessError::schema(path, None, e.to_string()))?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).map_err(|e| HarnessError::schema(path, Some(i), e.to_string())))
        .collect()
}

fn required<T>(v: Option<T>, path: &Path, i: usize, field: &str) -> Result<T, HarnessError> {
    v.ok_or_else(|| HarnessError::schema(path, Some(i), format!("missing field `{field}`")))
}

fn id_text(v: serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

fn task_file(root: &Path, name: &str) -> PathBuf {
    if root.is_file() {
        root.to_path_buf()
    } else {
        root.join(name)
    }
}

pub fn load_dataset(task: TaskKind, root: &Path) -> Result<Vec<Sample>, HarnessError> {
    match task {
        TaskKind::Fcqa => load_fcqa(root),
        TaskKind::Lcqa => load_lcqa(&task_file(root, "test.json")),
        TaskKind::Cs(src) => {
            let name = match src {
                CsSource::Pew => "pew.json",
                CsSource::Statista => "statista.json",
            };
            load_cs(&task_file(root, name))
        }
    }
}

fn load_fcqa(root: &Path) -> Result<Vec<Sample>, HarnessError> {
    let mut samples = Vec::new();
    let mut found = false;
    for split in [Split::Augmented, Split::Human] {
        let path = root.join(format!("test_{}.json", split.as_str()));
        if !path.exists() {
            continue;
        }
        found = true;
        for (i, rec) in read_records::<FcqaRecord>(&path)?.into_iter().enumerate() {
            let imgname = required(rec.imgname, &path, i, "imgname")?;
            let question = required(rec.query, &path, i, "query")?;
            let gold = match required(rec.label, &path, i, "label")? {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(HarnessError::schema(&path, Some(i), format!("label must be text, got {other}"))),
            };
            let stem = Path::new(&imgname).file_stem().map_or(imgname.clone(), |s| s.to_string_lossy().into_owned());
            samples.push(Sample {
                id: format!("{}/{stem}#{i}", split.as_str()),
                split: Some(split),
                input: question,
                gold,
                chart: load_chart(root, &stem)?,
            });
        }
    }
    if !found {
        return Err(HarnessError::schema(root, None, "no test_human.json or test_augmented.json"));
    }
    Ok(samples)
}

fn load_chart(root: &Path, stem: &str) -> Result<Option<ChartInput>, HarnessError> {
    let svg = root.join("svg").join(format!("{stem}.svg"));
    if svg.exists() {
        let text = std::fs::read_to_string(&svg).map_err(|e| HarnessError::io(&svg, e))?;
        let a = parse_svg_chart(&text).map_err(|e| HarnessError::schema(&svg, None, e.to_string()))?;
        return Ok(Some(ChartInput::Annotation(a)));
    }
    let ann = root.join("annotations").join(format!("{stem}.json"));
    if ann.exists() {
        let text = std::fs::read_to_string(&ann).map_err(|e| HarnessError::io(&ann, e))?;
        let a: ChartAnnotation =
            serde_json::from_str(&text).map_err(|e| HarnessError::schema(&ann, None, e.to_string()))?;
        a.validate().map_err(|e| HarnessError::schema(&ann, None, e.to_string()))?;
        return Ok(Some(ChartInput::Annotation(a)));
    }
    let csv_path = root.join("tables").join(format!("{stem}.csv"));
    if csv_path.exists() {
        return read_csv_table(&csv_path).map(|t| Some(ChartInput::Table(t)));
    }
    Ok(None)
}

/// Reads a CSV table: the header row holds the stub header and the column
/// headers, each later row a label followed by its cells.
pub fn read_csv_table(path: &Path) -> Result<DataTable, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::io(path, e))?;
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| HarnessError::schema(path, None, "empty CSV"))?
        .map_err(|e| HarnessError::schema(path, Some(0), e.to_string()))?;
    let mut fields = header.iter().map(str::to_string);
    let stub = fields.next().unwrap_or_default();
    let columns: Vec<String> = fields.collect();
    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| HarnessError::schema(path, Some(i + 1), e.to_string()))?;
        let mut it = rec.iter();
        let label = it.next().unwrap_or_default().to_string();
        rows.push(Row::new(label, it.map(Cell::new)));
    }
    DataTable::new(None, stub, columns, rows).map_err(|e| HarnessError::schema(path, None, e.to_string()))
}

fn load_lcqa(path: &Path) -> Result<Vec<Sample>, HarnessError> {
    read_records::<LcqaRecord>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let question = required(rec.question, path, i, "question")?;
            let title = required(rec.title, path, i, "title")?;
            let gold = required(rec.answer, path, i, "answer")?;
            let id = rec.id.map_or_else(|| i.to_string(), id_text);
            let ocr = rec.ocr.iter().map(|t| t.trim()).collect::<Vec<_>>().join(" <s> ");
            Ok(Sample {
                id,
                split: None,
                input: format!("{question} Title: {title} Context: {ocr}"),
                gold,
                chart: None,
            })
        })
        .collect()
}

fn load_cs(path: &Path) -> Result<Vec<Sample>, HarnessError> {
    read_records::<CsRecord>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, rec)| {
            let input = required(rec.input, path, i, "input")?;
            let gold = required(rec.summary, path, i, "summary")?;
            let id = rec.id.map_or_else(|| i.to_string(), id_text);
            // data-table inputs carry `&`-separated fields; OCR-only inputs do not
            let chart = if input.contains('&') {
                let (_, table) =
                    parse_chart2text_input(&input).map_err(|e| HarnessError::schema(path, Some(i), e.to_string()))?;
                Some(ChartInput::Table(table))
            } else {
                None
            };
            Ok(Sample { id, split: None, input, gold, chart })
        })
        .collect()
}
