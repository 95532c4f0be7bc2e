use std::collections::BTreeMap;

use super::table::{Cell, DataTable, Orientation, Row, VisualDataTable};
use super::ChartDataError;

/// Literal row separator. It is the printed token, not a newline byte.
pub const ROW_SEPARATOR: &str = " <0x0A> ";
pub(super) const ROW_TOKEN: &str = "<0x0A>";
const FIELD_SEPARATOR: &str = " | ";

/// Renders a visual data table as a single line.
///
/// The table title is not part of the line format and is dropped.
pub fn render_vdt_text(vdt: &VisualDataTable) -> String {
    let table = vdt.table();
    let colored = |label: &str, on: bool| match vdt.color_of(label) {
        Some(color) if on => format!("{label} ({color})"),
        _ => label.to_string(),
    };
    let vertical = vdt.orientation() == Orientation::Vertical;

    let mut lines = Vec::with_capacity(table.rows().len() + 1);
    let header: Vec<String> = std::iter::once(table.stub_header().to_string())
        .chain(table.column_headers().iter().map(|h| colored(h, vertical)))
        .collect();
    lines.push(header.join(FIELD_SEPARATOR));
    for row in table.rows() {
        let fields: Vec<String> = std::iter::once(colored(&row.label, !vertical))
            .chain(row.cells.iter().map(|c| c.raw().to_string()))
            .collect();
        lines.push(fields.join(FIELD_SEPARATOR));
    }
    lines.join(ROW_SEPARATOR)
}

/// Parses the single-line visual data table format produced by
/// [`render_vdt_text`].
pub fn parse_vdt_text(s: &str) -> Result<VisualDataTable, ChartDataError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ChartDataError::EmptyInput);
    }
    let mut lines = s.split(ROW_SEPARATOR);
    let header_line = lines.next().unwrap_or_default();
    let header: Vec<(&str, Option<&str>)> = header_line.split(FIELD_SEPARATOR).map(split_color).collect();
    let width = header.len();

    let (stub, stub_color) = header[0];
    if stub_color.is_some() {
        return Err(ChartDataError::UnknownColorKey(stub.to_string()));
    }
    let mut header_colors = BTreeMap::new();
    let mut column_headers = Vec::with_capacity(width - 1);
    for &(label, color) in &header[1..] {
        if let Some(color) = color {
            header_colors.insert(label.to_string(), color.to_string());
        }
        column_headers.push(label.to_string());
    }

    let mut rows = Vec::new();
    let mut row_colors: BTreeMap<String, Option<String>> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(FIELD_SEPARATOR).collect();
        if fields.len() != width {
            return Err(ChartDataError::MalformedRow { row: i, expected: width, found: fields.len() });
        }
        let (label, color) = split_color(fields[0]);
        let color = color.map(str::to_string);
        match row_colors.get(label) {
            Some(prev) if *prev != color => return Err(ChartDataError::ConflictingColor(label.to_string())),
            Some(_) => {}
            None => {
                row_colors.insert(label.to_string(), color);
            }
        }
        rows.push(Row::new(label, fields[1..].iter().map(|f| Cell::new(*f))));
    }
    let row_colors: BTreeMap<String, String> = row_colors.into_iter().filter_map(|(k, v)| v.map(|c| (k, c))).collect();

    let (orientation, colors) = match (header_colors.is_empty(), row_colors.is_empty()) {
        (false, false) => return Err(ChartDataError::MixedColorAttachment),
        (false, true) => (Orientation::Vertical, header_colors),
        _ => (Orientation::Horizontal, row_colors),
    };
    let table = DataTable::new(None, stub, column_headers, rows)?;
    VisualDataTable::new(orientation, table, colors)
}

// "Iraq (purple)" -> ("Iraq", Some("purple"))
fn split_color(field: &str) -> (&str, Option<&str>) {
    if let Some(body) = field.strip_suffix(')') {
        if let Some(open) = body.rfind(" (") {
            return (&field[..open], Some(&body[open + 2..]));
        }
    }
    (field, None)
}
