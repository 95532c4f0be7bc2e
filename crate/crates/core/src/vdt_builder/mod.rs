//! Ground-truth visual data tables from annotated charts.

mod build;
mod kdtree;
mod palette;
mod svg;

pub use build::{build_vdt, sort_annotation, DEFAULT_STUB_HEADER};
pub use palette::{nearest_color, ColorPalette, OverrideTable, Rgb};
pub use svg::{normalize_fill, parse_svg_chart, path_bbox};

use thiserror::Error;

use crate::chart_data::ChartDataError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VdtError {
    #[error("invalid hex color {0:?}, expected 6 hex digits")]
    InvalidHex(String),
    #[error("palette: {0}")]
    Palette(String),
    #[error("inconsistent series: {0}")]
    InconsistentSeries(String),
    #[error("annotation has no marks")]
    EmptyAnnotation,
    #[error("xml: {0}")]
    Xml(String),
    #[error("mark without a fill: {0}")]
    MissingFill(String),
    #[error("mark without a label association: {0}")]
    UnresolvableLabel(String),
    #[error(transparent)]
    Table(#[from] ChartDataError),
}
