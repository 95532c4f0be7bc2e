use std::collections::{BTreeMap, HashSet};

use rust_decimal::Decimal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::number::parse_number;
use super::ChartDataError;

/// One table entry: the text as it appeared plus its numeric reading, if any.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    raw: String,
    numeric: Option<Decimal>,
}

impl Cell {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let numeric = parse_number(&raw);
        Cell { raw, numeric }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn numeric(&self) -> Option<Decimal> {
        self.numeric
    }
}

impl From<&str> for Cell {
    fn from(raw: &str) -> Self {
        Cell::new(raw)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.raw)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Cell::new(String::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn new(label: impl Into<String>, cells: impl IntoIterator<Item = Cell>) -> Self {
        Row { label: label.into(), cells: cells.into_iter().collect() }
    }
}

/// A chart's underlying data: a stub header naming the label column, value
/// column headers, and labelled rows with one cell per value column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct DataTable {
    title: Option<String>,
    stub_header: String,
    column_headers: Vec<String>,
    rows: Vec<Row>,
}

#[derive(Deserialize)]
struct RawTable {
    title: Option<String>,
    stub_header: String,
    column_headers: Vec<String>,
    rows: Vec<Row>,
}

impl TryFrom<RawTable> for DataTable {
    type Error = ChartDataError;

    fn try_from(raw: RawTable) -> Result<Self, Self::Error> {
        DataTable::new(raw.title, raw.stub_header, raw.column_headers, raw.rows)
    }
}

impl DataTable {
    pub fn new(
        title: Option<String>,
        stub_header: impl Into<String>,
        column_headers: Vec<String>,
        rows: Vec<Row>,
    ) -> Result<Self, ChartDataError> {
        let stub_header = stub_header.into();
        for h in std::iter::once(&stub_header).chain(&column_headers) {
            if h.trim().is_empty() {
                return Err(ChartDataError::InvalidLabel { label: h.clone(), reason: "empty header" });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.label.trim().is_empty() {
                return Err(ChartDataError::InvalidLabel { label: row.label.clone(), reason: "empty row label" });
            }
            if row.cells.len() != column_headers.len() {
                return Err(ChartDataError::MalformedRow {
                    row: i,
                    expected: column_headers.len() + 1,
                    found: row.cells.len() + 1,
                });
            }
        }
        Ok(DataTable { title, stub_header, column_headers, rows })
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn stub_header(&self) -> &str {
        &self.stub_header
    }

    /// Value column headers, excluding the stub.
    pub fn column_headers(&self) -> &[String] {
        &self.column_headers
    }

    /// Stub header followed by the value column headers.
    pub fn headers(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.stub_header.as_str()).chain(self.column_headers.iter().map(String::as_str))
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn with_title(mut self, title: Option<String>) -> Self {
        self.title = title;
        self
    }

    /// Iterates `(row_label, column_header, cell)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &Cell)> {
        self.rows.iter().flat_map(move |row| {
            row.cells
                .iter()
                .zip(&self.column_headers)
                .map(move |(cell, header)| (row.label.as_str(), header.as_str(), cell))
        })
    }
}

/// All numeric cell values in row-major order, duplicates kept. Labels and
/// headers never contribute, even when they look like numbers (years).
pub fn collect_numbers(table: &DataTable) -> Vec<Decimal> {
    table.entries().filter_map(|(_, _, cell)| cell.numeric()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Categories as colored rows.
    Horizontal,
    /// Series as colored columns.
    Vertical,
}

/// A data table whose labels carry the natural-language color of their marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisualDataTable {
    orientation: Orientation,
    table: DataTable,
    label_colors: BTreeMap<String, String>,
}

impl VisualDataTable {
    /// Validates the table for the line format and attaches colors.
    ///
    /// A table without any colors is always stored as horizontal, since the
    /// text form cannot tell the two layouts apart.
    pub fn new(
        orientation: Orientation,
        table: DataTable,
        label_colors: BTreeMap<String, String>,
    ) -> Result<Self, ChartDataError> {
        for h in table.headers() {
            check_label(h)?;
        }
        for row in table.rows() {
            check_label(&row.label)?;
            for cell in &row.cells {
                check_cell(&row.label, cell.raw())?;
            }
        }
        for (key, color) in &label_colors {
            check_label(color)?;
            let known = match orientation {
                Orientation::Horizontal => table.rows().iter().any(|r| &r.label == key),
                Orientation::Vertical => table.column_headers().iter().any(|h| h == key),
            };
            if !known {
                return Err(ChartDataError::UnknownColorKey(key.clone()));
            }
        }
        let orientation = if label_colors.is_empty() { Orientation::Horizontal } else { orientation };
        Ok(VisualDataTable { orientation, table, label_colors })
    }

    /// A colorless visual table.
    pub fn plain(table: DataTable) -> Result<Self, ChartDataError> {
        Self::new(Orientation::Horizontal, table, BTreeMap::new())
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn table(&self) -> &DataTable {
        &self.table
    }

    pub fn label_colors(&self) -> &BTreeMap<String, String> {
        &self.label_colors
    }

    pub fn color_of(&self, label: &str) -> Option<&str> {
        self.label_colors.get(label).map(String::as_str)
    }

    pub fn into_table(self) -> DataTable {
        self.table
    }
}

fn has_separator(s: &str) -> bool {
    s.contains('|') || s.contains(super::vdt_text::ROW_TOKEN) || s.contains(['\n', '\r'])
}

pub(super) fn check_label(label: &str) -> Result<(), ChartDataError> {
    let reason = if label.trim().is_empty() {
        "empty"
    } else if label.trim() != label {
        "surrounding whitespace"
    } else if has_separator(label) {
        "contains a separator"
    } else if label.contains(['(', ')']) {
        "contains a parenthesis"
    } else {
        return Ok(());
    };
    Err(ChartDataError::InvalidLabel { label: label.to_string(), reason })
}

fn check_cell(row: &str, raw: &str) -> Result<(), ChartDataError> {
    let reason = if raw.is_empty() {
        "empty"
    } else if raw.trim() != raw {
        "surrounding whitespace"
    } else if has_separator(raw) {
        "contains a separator"
    } else {
        return Ok(());
    };
    Err(ChartDataError::InvalidCell { row: row.to_string(), raw: raw.to_string(), reason })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Bar,
    GroupedBar,
    StackedBar,
    Line,
    MultiLine,
    Pie,
}

impl ChartType {
    pub fn as_str(self) -> &'static str {
        match self {
            ChartType::Bar => "bar",
            ChartType::GroupedBar => "grouped_bar",
            ChartType::StackedBar => "stacked_bar",
            ChartType::Line => "line",
            ChartType::MultiLine => "multi_line",
            ChartType::Pie => "pie",
        }
    }
}

impl std::str::FromStr for ChartType {
    type Err = ChartDataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "bar" => ChartType::Bar,
            "grouped_bar" => ChartType::GroupedBar,
            "stacked_bar" => ChartType::StackedBar,
            "line" => ChartType::Line,
            "multi_line" => ChartType::MultiLine,
            "pie" => ChartType::Pie,
            other => return Err(ChartDataError::InvalidAnnotation(format!("unknown chart type {other:?}"))),
        })
    }
}

/// Pixel-space bounding box; `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BBox { x, y, w, h }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextElement {
    pub text: String,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mark {
    pub series_label: String,
    pub category_label: Option<String>,
    pub value: Decimal,
    pub hex_color: String,
    pub bbox: BBox,
}

/// A parsed chart: typed marks with positions and colors, and positioned text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartAnnotation {
    pub chart_type: ChartType,
    pub title: String,
    /// Name of the label column (the category axis title); defaults to
    /// `Characteristic` when the chart has none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stub_header: Option<String>,
    pub text_elements: Vec<TextElement>,
    pub marks: Vec<Mark>,
}

impl ChartAnnotation {
    pub fn validate(&self) -> Result<(), ChartDataError> {
        let bad = |msg: String| Err(ChartDataError::InvalidAnnotation(msg));
        let bbox_ok = |b: &BBox| [b.x, b.y, b.w, b.h].iter().all(|v| v.is_finite()) && b.w >= 0.0 && b.h >= 0.0;
        for t in &self.text_elements {
            if !bbox_ok(&t.bbox) {
                return bad(format!("text {:?} has an invalid bbox", t.text));
            }
        }
        let mut seen = HashSet::new();
        for m in &self.marks {
            if !bbox_ok(&m.bbox) {
                return bad(format!("mark {:?} has an invalid bbox", m.series_label));
            }
            if m.hex_color.len() != 6 || !m.hex_color.chars().all(|c| c.is_ascii_hexdigit()) {
                return bad(format!("mark {:?} has hex color {:?}", m.series_label, m.hex_color));
            }
            if !seen.insert((&m.series_label, &m.category_label)) {
                return bad(format!("duplicate mark for series {:?} category {:?}", m.series_label, m.category_label));
            }
        }
        Ok(())
    }
}
