use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use rust_decimal::Decimal;

use super::palette::{nearest_color, ColorPalette, OverrideTable};
use super::VdtError;
use crate::chart_data::{BBox, Cell, ChartAnnotation, DataTable, Mark, Orientation, Row, VisualDataTable};

pub const DEFAULT_STUB_HEADER: &str = "Characteristic";
const UNCATEGORIZED_VALUE_HEADER: &str = "Value";

fn reading_order(a: &BBox, b: &BBox) -> Ordering {
    (a.y.round() as i64).cmp(&(b.y.round() as i64)).then(a.x.total_cmp(&b.x))
}

/// Orders marks and text elements top-to-bottom, then left-to-right, with
/// y snapped to whole pixels. The sort is stable.
pub fn sort_annotation(a: &ChartAnnotation) -> ChartAnnotation {
    let mut sorted = a.clone();
    sorted.marks.sort_by(|m, n| reading_order(&m.bbox, &n.bbox));
    sorted.text_elements.sort_by(|s, t| reading_order(&s.bbox, &t.bbox));
    sorted
}

/// Builds the ground-truth visual data table for an annotated chart.
///
/// Charts whose marks all carry a category become either a horizontal table
/// (one series: categories are colored rows) or a vertical one (several
/// series: series are colored columns, categories are rows). Charts without
/// categories list each series as a colored row. Labels are ordered by where
/// their text first appears on the chart, falling back to the first mark
/// when a label has no text element.
pub fn build_vdt(
    a: &ChartAnnotation,
    palette: &ColorPalette,
    overrides: &OverrideTable,
) -> Result<VisualDataTable, VdtError> {
    a.validate()?;
    if a.marks.is_empty() {
        return Err(VdtError::EmptyAnnotation);
    }
    let sorted = sort_annotation(a);
    let stub = a.stub_header.clone().unwrap_or_else(|| DEFAULT_STUB_HEADER.to_string());
    let color = |m: &Mark| nearest_color(&m.hex_color, palette, overrides);

    let with_category = sorted.marks.iter().filter(|m| m.category_label.is_some()).count();
    if with_category == 0 {
        let series = ordered_labels(&sorted, sorted.marks.iter().map(|m| m.series_label.as_str()));
        let by_series: HashMap<&str, &Mark> = sorted.marks.iter().map(|m| (m.series_label.as_str(), m)).collect();
        let mut rows = Vec::new();
        let mut colors = BTreeMap::new();
        for s in &series {
            let mark = by_series[s.as_str()];
            rows.push(Row::new(s.clone(), [value_cell(mark.value)]));
            colors.insert(s.clone(), color(mark)?);
        }
        let table = DataTable::new(Some(a.title.clone()), stub, vec![UNCATEGORIZED_VALUE_HEADER.into()], rows)?;
        return Ok(VisualDataTable::new(Orientation::Horizontal, table, colors)?);
    }
    if with_category != sorted.marks.len() {
        return Err(VdtError::InconsistentSeries("some marks have a category and some do not".into()));
    }

    let series = ordered_labels(&sorted, sorted.marks.iter().map(|m| m.series_label.as_str()));
    let categories = ordered_labels(&sorted, sorted.marks.iter().map(category_of));
    let cell_of: HashMap<(&str, &str), &Mark> =
        sorted.marks.iter().map(|m| ((m.series_label.as_str(), category_of(m)), m)).collect();

    let mut per_series: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for m in &sorted.marks {
        per_series.entry(&m.series_label).or_default().insert(category_of(m));
    }
    let reference = &per_series[series[0].as_str()];
    if let Some((s, _)) = per_series.iter().find(|(_, cats)| *cats != reference) {
        return Err(VdtError::InconsistentSeries(format!(
            "series {s:?} covers different categories than {:?}",
            series[0]
        )));
    }

    let mut colors = BTreeMap::new();
    let mut rows = Vec::with_capacity(categories.len());
    if series.len() == 1 {
        let s = series[0].as_str();
        for c in &categories {
            let mark = cell_of[&(s, c.as_str())];
            rows.push(Row::new(c.clone(), [value_cell(mark.value)]));
            colors.insert(c.clone(), color(mark)?);
        }
        let table = DataTable::new(Some(a.title.clone()), stub, series, rows)?;
        return Ok(VisualDataTable::new(Orientation::Horizontal, table, colors)?);
    }

    for s in &series {
        // first mark of the series in reading order
        let mark = sorted.marks.iter().find(|m| &m.series_label == s).expect("series comes from marks");
        colors.insert(s.clone(), color(mark)?);
    }
    for c in &categories {
        let cells = series.iter().map(|s| value_cell(cell_of[&(s.as_str(), c.as_str())].value));
        rows.push(Row::new(c.clone(), cells));
    }
    let table = DataTable::new(Some(a.title.clone()), stub, series, rows)?;
    Ok(VisualDataTable::new(Orientation::Vertical, table, colors)?)
}

fn category_of(m: &Mark) -> &str {
    m.category_label.as_deref().expect("checked above")
}

fn value_cell(v: Decimal) -> Cell {
    Cell::new(v.to_string())
}

fn ordered_labels<'a>(sorted: &ChartAnnotation, labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut first_mark: Vec<&str> = Vec::new();
    for l in labels {
        if !first_mark.contains(&l) {
            first_mark.push(l);
        }
    }
    let text_rank: Vec<Option<usize>> =
        first_mark.iter().map(|l| sorted.text_elements.iter().position(|t| t.text.trim() == *l)).collect();
    if text_rank.iter().all(Option::is_some) {
        let mut ranked: Vec<(usize, &str)> =
            text_rank.iter().zip(&first_mark).map(|(r, l)| (r.expect("all some"), *l)).collect();
        ranked.sort();
        ranked.into_iter().map(|(_, l)| l.to_string()).collect()
    } else {
        first_mark.into_iter().map(str::to_string).collect()
    }
}
