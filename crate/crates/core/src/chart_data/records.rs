use serde::{Deserialize, Serialize};

use super::table::{Cell, DataTable, Row};
use super::ChartDataError;

const CONTEXT_MARKER: &str = "Context:";
const TITLE_MARKER: &str = "Title:";
const RECORD_SEPARATOR: &str = "<SEP>";
const OCR_SEPARATOR: &str = "<s>";

/// A chart title and its OCR tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OcrDocument {
    pub title: String,
    pub tokens: Vec<String>,
}

/// Parses a Chart-to-Text style input: an optional `<title> Context:` prefix
/// followed by `<SEP>`-separated records whose fields are split on `&`.
///
/// The first record supplies the headers; every later record becomes a row
/// keyed by its first field. A trailing sentence period (`... 15816 .`) is
/// dropped.
pub fn parse_chart2text_input(s: &str) -> Result<(String, DataTable), ChartDataError> {
    let (title, body) = match s.find(CONTEXT_MARKER) {
        Some(i) => (s[..i].trim(), &s[i + CONTEXT_MARKER.len()..]),
        None => ("", s),
    };
    let mut body = body.trim();
    if let Some(stripped) = body.strip_suffix('.') {
        if stripped.ends_with(char::is_whitespace) {
            body = stripped.trim_end();
        }
    }

    let records: Vec<Vec<&str>> = body
        .split(RECORD_SEPARATOR)
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| r.split('&').map(str::trim).collect())
        .collect();
    let Some(first) = records.first() else {
        return Err(ChartDataError::EmptyInput);
    };
    let width = first.len();
    if let Some((i, r)) = records.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(ChartDataError::InconsistentArity { record: i, expected: width, found: r.len() });
    }

    let rows = records[1..].iter().map(|r| Row::new(r[0], r[1..].iter().map(|f| Cell::new(*f)))).collect();
    let table_title = (!title.is_empty()).then(|| title.to_string());
    let table = DataTable::new(table_title, first[0], first[1..].iter().map(|h| h.to_string()).collect(), rows)?;
    Ok((title.to_string(), table))
}

/// Splits an OpenCQA style `Title: ... Context: a <s> b <s> c` string.
///
/// Without a `Context:` marker the title runs from `Title:` to the first
/// `<s>`; without either marker the title is empty and the whole string is
/// tokenized.
pub fn parse_opencqa_context(s: &str) -> OcrDocument {
    let (title, body) = if let Some(ci) = s.find(CONTEXT_MARKER) {
        let head = &s[..ci];
        let title = head.find(TITLE_MARKER).map_or("", |ti| &head[ti + TITLE_MARKER.len()..]);
        (title, &s[ci + CONTEXT_MARKER.len()..])
    } else if let Some(ti) = s.find(TITLE_MARKER) {
        let rest = &s[ti + TITLE_MARKER.len()..];
        match rest.find(OCR_SEPARATOR) {
            Some(si) => (&rest[..si], &rest[si + OCR_SEPARATOR.len()..]),
            None => (rest, ""),
        }
    } else {
        ("", s)
    };
    let tokens = body.split(OCR_SEPARATOR).map(str::trim).filter(|t| !t.is_empty()).map(str::to_string).collect();
    OcrDocument { title: title.trim().to_string(), tokens }
}
