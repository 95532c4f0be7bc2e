//! Deterministic synthetic charts with known ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::chart_data::{render_vdt_text, Cell, ChartType, DataTable, Orientation, Row, VisualDataTable};
use crate::vdt_builder::{nearest_color, ColorPalette, OverrideTable, Rgb};

pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_VERSION: u32 = 1;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 600.0;
const TOP: f64 = 70.0;
const BASELINE: f64 = 340.0;

const COUNTRIES: &[&str] = &[
    "Peru", "Chile", "Kenya", "Norway", "Japan", "Brazil", "Canada", "Ghana", "Spain", "Vietnam", "Mexico", "Poland",
    "Egypt", "India", "Iraq", "Nepal",
];
const SERIES: &[&str] = &[
    "Imports",
    "Exports",
    "Revenue",
    "Costs",
    "Approve",
    "Disapprove",
    "Men",
    "Women",
    "Urban",
    "Rural",
    "Online",
    "In store",
];
const STUBS: &[&str] = &["Country", "Year", "Region", "Category", "Characteristic"];
const TOPICS: &[&str] =
    &["Share of respondents", "Annual output", "Survey results", "Market size", "Average score", "Population growth"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub id: String,
    pub chart_type: ChartType,
    pub svg: String,
    pub vdt: String,
    pub table: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub seed: u64,
    pub charts: Vec<ChartEntry>,
}

struct Spec {
    chart_type: ChartType,
    title: String,
    stub: String,
    series: Vec<String>,
    categories: Vec<String>,
    /// values[series][category]
    values: Vec<Vec<Decimal>>,
    /// color names and emitted hexes of the colored labels
    colors: Vec<(String, Rgb)>,
}

impl Spec {
    fn multi_series(&self) -> bool {
        self.series.len() > 1
    }

    /// Hex of the mark for (series, category).
    fn mark_rgb(&self, s: usize, c: usize) -> Rgb {
        match self.chart_type {
            ChartType::Line | ChartType::MultiLine | ChartType::GroupedBar | ChartType::StackedBar => self.colors[s].1,
            ChartType::Bar | ChartType::Pie => self.colors[c].1,
        }
    }

    fn truth(&self) -> Result<VisualDataTable, HarnessError> {
        let mut labels = BTreeMap::new();
        let orientation = if self.multi_series() { Orientation::Vertical } else { Orientation::Horizontal };
        let colored: &[String] = match self.chart_type {
            ChartType::Bar | ChartType::Pie => &self.categories,
            _ => &self.series,
        };
        if self.multi_series() {
            for (l, (name, _)) in colored.iter().zip(&self.colors) {
                labels.insert(l.clone(), name.clone());
            }
        } else {
            // one series: every category row carries its mark's color
            for (c, cat) in self.categories.iter().enumerate() {
                let name = match self.chart_type {
                    ChartType::Bar | ChartType::Pie => &self.colors[c].0,
                    _ => &self.colors[0].0,
                };
                labels.insert(cat.clone(), name.clone());
            }
        }
        let rows = self
            .categories
            .iter()
            .enumerate()
            .map(|(c, cat)| Row::new(cat.clone(), self.values.iter().map(|v| Cell::new(v[c].to_string()))))
            .collect();
        let table = DataTable::new(Some(self.title.clone()), self.stub.clone(), self.series.clone(), rows)?;
        Ok(VisualDataTable::new(orientation, table, labels)?)
    }
}

/// Palette names that win their own coordinates under the tie-break.
fn usable_colors(palette: &ColorPalette) -> Vec<(String, Rgb)> {
    palette
        .entries()
        .iter()
        .filter(|(name, rgb)| palette.nearest(*rgb) == name && OverrideTable::bundled().get(&rgb.to_hex()).is_none())
        .cloned()
        .collect()
}

/// A color a few units away from `base` that still maps to `name`.
fn jitter(rng: &mut ChaCha8Rng, name: &str, base: Rgb, palette: &ColorPalette) -> Rgb {
    for radius in [6i16, 3, 1] {
        for _ in 0..8 {
            let mut ch = |v: u8| (i16::from(v) + rng.gen_range(-radius..=radius)).clamp(0, 255) as u8;
            let cand = Rgb(ch(base.0), ch(base.1), ch(base.2));
            let by_scan = palette.nearest_by(cand, |a, b| a.distance_sq(b));
            let with_overrides = nearest_color(&cand.to_hex(), palette, OverrideTable::bundled()).ok();
            if by_scan == name && with_overrides.as_deref() == Some(name) {
                return cand;
            }
        }
    }
    base
}

fn random_spec(rng: &mut ChaCha8Rng, palette: &ColorPalette, usable: &[(String, Rgb)]) -> Spec {
    let chart_type = *[ChartType::Bar, ChartType::GroupedBar, ChartType::Line, ChartType::MultiLine, ChartType::Pie]
        .choose(rng)
        .expect("non-empty");
    let (n_series, n_cats) = match chart_type {
        ChartType::Bar => (1, rng.gen_range(2..=7)),
        ChartType::GroupedBar => (rng.gen_range(2..=3), rng.gen_range(2..=5)),
        ChartType::Line => (1, rng.gen_range(3..=7)),
        ChartType::MultiLine => (rng.gen_range(2..=3), rng.gen_range(3..=7)),
        _ => (1, rng.gen_range(2..=6)),
    };
    let categories: Vec<String> = if matches!(chart_type, ChartType::Line | ChartType::MultiLine) {
        let start = rng.gen_range(1990..=2015);
        (0..n_cats).map(|i| (start + i).to_string()).collect()
    } else {
        COUNTRIES.choose_multiple(rng, n_cats).map(|s| s.to_string()).collect()
    };
    let series: Vec<String> = if n_series == 1 {
        vec![["Value", "Share", "Total"].choose(rng).expect("non-empty").to_string()]
    } else {
        SERIES.choose_multiple(rng, n_series).map(|s| s.to_string()).collect()
    };
    let values =
        (0..n_series).map(|_| (0..n_cats).map(|_| Decimal::new(rng.gen_range(5..=999), 1)).collect()).collect();
    let n_colors = if matches!(chart_type, ChartType::Bar | ChartType::Pie) { n_cats } else { n_series };
    let colors = usable
        .choose_multiple(rng, n_colors)
        .map(|(name, base)| (name.clone(), jitter(rng, name, *base, palette)))
        .collect();
    Spec {
        chart_type,
        title: format!("{} {}", TOPICS.choose(rng).expect("non-empty"), rng.gen_range(1..=99)),
        stub: STUBS.choose(rng).expect("non-empty").to_string(),
        series,
        categories,
        values,
        colors,
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, role: Option<&str>, s: &str) {
    let role = role.map(|r| format!(" data-role=\"{r}\"")).unwrap_or_default();
    let _ =
        writeln!(out, r#"  <text x="{x:.2}" y="{y:.2}" font-size="12" text-anchor="{anchor}"{role}>{}</text>"#, esc(s));
}

fn mark_attrs(spec: &Spec, s: usize, c: usize) -> String {
    format!(
        r##"class="mark" data-series="{}" data-category="{}" data-value="{}" fill="#{}""##,
        esc(&spec.series[s]),
        esc(&spec.categories[c]),
        spec.values[s][c],
        spec.mark_rgb(s, c).to_hex()
    )
}

fn render_svg(spec: &Spec) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" data-chart-type="{}">"#,
        spec.chart_type.as_str()
    );
    text(&mut out, WIDTH / 2.0, 24.0, "middle", Some("title"), &spec.title);
    let max = spec.values.iter().flatten().copied().max().unwrap_or(Decimal::ONE);
    let max = f64::try_from(max).unwrap_or(1.0).max(1e-9);
    let height_of = |v: Decimal| f64::try_from(v).unwrap_or(0.0) / max * (BASELINE - TOP);
    let n = spec.categories.len() as f64;
    let slot = (RIGHT - LEFT) / n;

    if spec.multi_series() {
        // legend row above the plot
        for (s, label) in spec.series.iter().enumerate() {
            let x = LEFT + s as f64 * 130.0;
            let _ = writeln!(
                out,
                r##"  <rect x="{x:.2}" y="38" width="10" height="10" fill="#{}"/>"##,
                spec.colors[s].1.to_hex()
            );
            text(&mut out, x + 14.0, 48.0, "start", Some("legend"), label);
        }
    }

    match spec.chart_type {
        ChartType::Pie => {
            let total: f64 = spec.values[0].iter().map(|v| f64::try_from(*v).unwrap_or(0.0)).sum();
            let (cx, cy, r) = (220.0, 210.0, 120.0);
            let mut angle = -std::f64::consts::FRAC_PI_2;
            for c in 0..spec.categories.len() {
                let sweep = f64::try_from(spec.values[0][c]).unwrap_or(0.0) / total * std::f64::consts::TAU;
                let (x0, y0) = (cx + r * angle.cos(), cy + r * angle.sin());
                let end = angle + sweep;
                let (x1, y1) = (cx + r * end.cos(), cy + r * end.sin());
                let large = u8::from(sweep > std::f64::consts::PI);
                let _ = writeln!(
                    out,
                    r#"  <path d="M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r} {r} 0 {large} 1 {x1:.2} {y1:.2} Z" {}/>"#,
                    mark_attrs(spec, 0, c)
                );
                angle = end;
            }
            for (c, label) in spec.categories.iter().enumerate() {
                let y = 100.0 + c as f64 * 22.0;
                let _ = writeln!(
                    out,
                    r##"  <rect x="420" y="{:.2}" width="10" height="10" fill="#{}"/>"##,
                    y - 10.0,
                    spec.colors[c].1.to_hex()
                );
                text(&mut out, 436.0, y, "start", Some("legend"), label);
            }
        }
        ChartType::Line | ChartType::MultiLine => {
            for s in 0..spec.series.len() {
                let points: Vec<(f64, f64)> = (0..spec.categories.len())
                    .map(|c| (LEFT + (c as f64 + 0.5) * slot, BASELINE - height_of(spec.values[s][c])))
                    .collect();
                let d: Vec<String> = points
                    .iter()
                    .enumerate()
                    .map(|(i, (x, y))| format!("{} {x:.2} {y:.2}", if i == 0 { "M" } else { "L" }))
                    .collect();
                let _ = writeln!(
                    out,
                    r##"  <path d="{}" fill="none" stroke="#{}"/>"##,
                    d.join(" "),
                    spec.colors[s].1.to_hex()
                );
                for (c, (x, y)) in points.iter().enumerate() {
                    let _ = writeln!(out, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="3" {}/>"#, mark_attrs(spec, s, c));
                }
            }
        }
        _ => {
            let k = spec.series.len() as f64;
            let bar = slot * 0.8 / k;
            for c in 0..spec.categories.len() {
                for s in 0..spec.series.len() {
                    let h = height_of(spec.values[s][c]);
                    let x = LEFT + c as f64 * slot + slot * 0.1 + s as f64 * bar;
                    let _ = writeln!(
                        out,
                        r#"  <rect x="{x:.2}" y="{:.2}" width="{bar:.2}" height="{h:.2}" {}/>"#,
                        BASELINE - h,
                        mark_attrs(spec, s, c)
                    );
                }
            }
        }
    }
    if spec.chart_type != ChartType::Pie {
        for (c, label) in spec.categories.iter().enumerate() {
            text(&mut out, LEFT + (c as f64 + 0.5) * slot, BASELINE + 18.0, "middle", Some("tick"), label);
        }
        text(&mut out, WIDTH / 2.0, BASELINE + 44.0, "middle", Some("stub-header"), &spec.stub);
    } else {
        text(&mut out, 436.0, 76.0, "start", Some("stub-header"), &spec.stub);
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `n` charts as `chart_NNNN.svg` with `.vdt.txt` and `.table.json`
/// ground truth, plus a manifest. Output depends only on `n` and `seed`.
pub fn generate_synthetic_charts(n: usize, seed: u64, out_dir: &Path) -> Result<Manifest, HarnessError> {
    if n == 0 {
        return Err(HarnessError::Config("chart count must be at least 1".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let palette = ColorPalette::css3();
    let usable = usable_colors(palette);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut charts = Vec::with_capacity(n);
    for i in 0..n {
        let spec = random_spec(&mut rng, palette, &usable);
        let id = format!("chart_{i:04}");
        let truth = spec.truth()?;
        let files = [
            (format!("{id}.svg"), render_svg(&spec)),
            (format!("{id}.vdt.txt"), render_vdt_text(&truth) + "\n"),
            (format!("{id}.table.json"), serde_json::to_string_pretty(truth.table()).expect("table serializes") + "\n"),
        ];
        for (name, body) in &files {
            let path = out_dir.join(name);
            std::fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
        }
        let [svg, vdt, table] = files.map(|(name, _)| name);
        charts.push(ChartEntry { id, chart_type: spec.chart_type, svg, vdt, table });
    }
    let manifest = Manifest { version: MANIFEST_VERSION, seed, charts };
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(|e| HarnessError::io(&path, e))?;
    Ok(manifest)
}
