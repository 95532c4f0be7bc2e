//! Chart, table and benchmark-input types, plus the text formats they travel in.
//!
//! Three line formats are supported:
//!
//! * visual data tables: `Header | Header (color) <0x0A> Label (color) | 8.5`
//! * Chart-to-Text records: `Year & Value <SEP> 2018 & 21890`
//! * OpenCQA OCR context: `Title: ... Context: tok <s> tok <s> tok`

mod number;
mod records;
mod table;
mod vdt_text;

pub use number::{parse_number, stated_decimals};
pub use records::{parse_chart2text_input, parse_opencqa_context, OcrDocument};
pub use table::{
    collect_numbers, BBox, Cell, ChartAnnotation, ChartType, DataTable, Mark, Orientation, Row, TextElement,
    VisualDataTable,
};
pub use vdt_text::{parse_vdt_text, render_vdt_text, ROW_SEPARATOR};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartDataError {
    #[error("empty input")]
    EmptyInput,
    #[error("row {row} has {found} fields, header has {expected}")]
    MalformedRow { row: usize, expected: usize, found: usize },
    #[error("record {record} has {found} fields, expected {expected}")]
    InconsistentArity { record: usize, expected: usize, found: usize },
    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: &'static str },
    #[error("invalid cell {raw:?} in row {row:?}: {reason}")]
    InvalidCell { row: String, raw: String, reason: &'static str },
    #[error("color key {0:?} is not a label of the table")]
    UnknownColorKey(String),
    #[error("colors attached to both headers and row labels")]
    MixedColorAttachment,
    #[error("label {0:?} appears more than once with different colors")]
    ConflictingColor(String),
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
}
