//! Chart annotations from SVG.
//!
//! Expected markup (what the synthetic chart emitter writes):
//!
//! * root `<svg data-chart-type="grouped_bar">`
//! * one element per data mark (`rect`, `circle`, `ellipse` or `path`)
//!   carrying `data-series`, optional `data-category` and `data-value`
//! * mark color from a `fill` attribute, a `fill:` inline style, or the
//!   nearest ancestor `<g>` that sets one
//! * `<text>` elements for everything printed on the chart; `data-role="title"`
//!   marks the title and `data-role="stub-header"` the category axis title
//!
//! Transforms are not applied.

use once_cell::sync::Lazy;
use regex::Regex;
use roxmltree::{Document, Node};
use rust_decimal::Decimal;

use super::palette::{ColorPalette, Rgb};
use super::VdtError;
use crate::chart_data::{parse_number, BBox, ChartAnnotation, ChartType, Mark, TextElement};

const DEFAULT_FONT_SIZE: f64 = 12.0;
// rough glyph advance relative to the font size
const GLYPH_WIDTH: f64 = 0.6;

pub fn parse_svg_chart(svg: &str) -> Result<ChartAnnotation, VdtError> {
    let doc = Document::parse(svg).map_err(|e| VdtError::Xml(e.to_string()))?;
    let root = doc.root_element();
    let chart_type = match root.attribute("data-chart-type") {
        Some(t) => t.parse::<ChartType>()?,
        None => ChartType::Bar,
    };

    let mut title = None;
    let mut stub_header = None;
    let mut text_elements = Vec::new();
    let mut marks = Vec::new();

    for node in root.descendants().filter(Node::is_element) {
        let tag = node.tag_name().name();
        if tag == "text" {
            let text = text_content(node);
            if text.is_empty() {
                continue;
            }
            match node.attribute("data-role") {
                Some("title") => title = Some(text.clone()),
                Some("stub-header") => stub_header = Some(text.clone()),
                _ => {}
            }
            text_elements.push(TextElement { bbox: text_bbox(node, &text), text });
        } else if tag == "title" && node.parent().is_some_and(|p| p == root) {
            title.get_or_insert_with(|| text_content(node));
        } else if node.has_attribute("data-series")
            || node.has_attribute("data-value")
            || node.attribute("class").is_some_and(|c| c.split_whitespace().any(|w| w == "mark"))
        {
            marks.push(parse_mark(node)?);
        }
    }

    let annotation =
        ChartAnnotation { chart_type, title: title.unwrap_or_default(), stub_header, text_elements, marks };
    annotation.validate()?;
    Ok(annotation)
}

fn describe(node: Node) -> String {
    let pos = node.document().text_pos_at(node.range().start);
    format!("<{}> at {}:{}", node.tag_name().name(), pos.row, pos.col)
}

fn parse_mark(node: Node) -> Result<Mark, VdtError> {
    let series_label = node
        .attribute("data-series")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| VdtError::UnresolvableLabel(describe(node)))?
        .to_string();
    let category_label = node.attribute("data-category").map(|c| c.trim().to_string());
    let value: Decimal = node
        .attribute("data-value")
        .and_then(parse_number)
        .ok_or_else(|| VdtError::UnresolvableLabel(format!("{} has no numeric data-value", describe(node))))?;
    let hex_color = resolve_fill(node).ok_or_else(|| VdtError::MissingFill(describe(node)))?;
    let bbox =
        geometry_bbox(node).ok_or_else(|| VdtError::Xml(format!("{} has no usable geometry", describe(node))))?;
    Ok(Mark { series_label, category_label, value, hex_color, bbox })
}

fn text_content(node: Node) -> String {
    let raw: String = node.descendants().filter(Node::is_text).filter_map(|n| n.text()).collect();
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn num_attr(node: Node, name: &str) -> Option<f64> {
    let v = node.attribute(name)?.trim();
    v.strip_suffix("px").unwrap_or(v).trim().parse().ok()
}

fn text_bbox(node: Node, text: &str) -> BBox {
    let size = num_attr(node, "font-size").unwrap_or(DEFAULT_FONT_SIZE);
    let width = text.chars().count() as f64 * size * GLYPH_WIDTH;
    let x = num_attr(node, "x").unwrap_or(0.0);
    let baseline = num_attr(node, "y").unwrap_or(0.0);
    let left = match node.attribute("text-anchor") {
        Some("middle") => x - width / 2.0,
        Some("end") => x - width,
        _ => x,
    };
    BBox::new(left, baseline - size, width, size)
}

fn resolve_fill(node: Node) -> Option<String> {
    for n in node.ancestors().filter(Node::is_element) {
        let declared = n
            .attribute("style")
            .and_then(|style| {
                style.split(';').find_map(|decl| {
                    let (k, v) = decl.split_once(':')?;
                    (k.trim() == "fill").then(|| v.trim())
                })
            })
            .or_else(|| n.attribute("fill"));
        if let Some(value) = declared {
            return normalize_fill(value);
        }
    }
    None
}

static RGB_FN: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"^rgb\(\s*(\d+(?:\.\d+)?)(%?)\s*,\s*(\d+(?:\.\d+)?)(%?)\s*,\s*(\d+(?:\.\d+)?)(%?)\s*\)$").unwrap()
});

/// Normalizes an SVG paint value to six lowercase hex digits. `none`,
/// gradients and unknown keywords yield `None`.
pub fn normalize_fill(value: &str) -> Option<String> {
    let v = value.trim().to_ascii_lowercase();
    if let Some(hex) = v.strip_prefix('#') {
        let expanded = match hex.len() {
            3 => hex.chars().flat_map(|c| [c, c]).collect(),
            6 => hex.to_string(),
            _ => return None,
        };
        return Rgb::from_hex(&expanded).ok().map(Rgb::to_hex);
    }
    if let Some(c) = RGB_FN.captures(&v) {
        let channel = |i: usize| -> Option<u8> {
            let n: f64 = c[i].parse().ok()?;
            let n = if &c[i + 1] == "%" { n * 255.0 / 100.0 } else { n };
            (0.0..=255.0).contains(&n).then(|| n.round() as u8)
        };
        return Some(Rgb(channel(1)?, channel(3)?, channel(5)?).to_hex());
    }
    ColorPalette::css3().rgb_of(&v).map(Rgb::to_hex)
}

fn geometry_bbox(node: Node) -> Option<BBox> {
    match node.tag_name().name() {
        "rect" => Some(BBox::new(
            num_attr(node, "x").unwrap_or(0.0),
            num_attr(node, "y").unwrap_or(0.0),
            num_attr(node, "width")?,
            num_attr(node, "height")?,
        )),
        "circle" => {
            let r = num_attr(node, "r")?;
            Some(BBox::new(num_attr(node, "cx")? - r, num_attr(node, "cy")? - r, 2.0 * r, 2.0 * r))
        }
        "ellipse" => {
            let (rx, ry) = (num_attr(node, "rx")?, num_attr(node, "ry")?);
            Some(BBox::new(num_attr(node, "cx")? - rx, num_attr(node, "cy")? - ry, 2.0 * rx, 2.0 * ry))
        }
        "path" => path_bbox(node.attribute("d")?),
        _ => None,
    }
}

static PATH_TOKEN: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[MmLlHhVvZzCcSsQqTtAa]|[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?").unwrap());

/// Bounding box of the points a path visits: endpoints and control points.
/// Arcs contribute their endpoints only.
pub fn path_bbox(d: &str) -> Option<BBox> {
    let tokens: Vec<&str> = PATH_TOKEN.find_iter(d).map(|m| m.as_str()).collect();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let (mut cx, mut cy, mut start) = (0.0f64, 0.0f64, (0.0f64, 0.0f64));
    let mut cmd = 'M';
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i];
        if t.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            cmd = t.chars().next().unwrap();
            i += 1;
            if cmd.eq_ignore_ascii_case(&'z') {
                (cx, cy) = start;
            }
            continue;
        }
        let arity = match cmd.to_ascii_uppercase() {
            'M' | 'L' | 'T' => 2,
            'H' | 'V' => 1,
            'C' => 6,
            'S' | 'Q' => 4,
            'A' => 7,
            _ => return None,
        };
        if i + arity > tokens.len() {
            return None;
        }
        let args: Vec<f64> = tokens[i..i + arity].iter().map(|s| s.parse()).collect::<Result<_, _>>().ok()?;
        i += arity;
        let rel = cmd.is_ascii_lowercase();
        let abs = |x: f64, y: f64| if rel { (cx + x, cy + y) } else { (x, y) };
        match cmd.to_ascii_uppercase() {
            'H' => cx = if rel { cx + args[0] } else { args[0] },
            'V' => cy = if rel { cy + args[0] } else { args[0] },
            'A' => (cx, cy) = abs(args[5], args[6]),
            _ => {
                for pair in args.chunks(2) {
                    points.push(abs(pair[0], pair[1]));
                }
                (cx, cy) = abs(args[arity - 2], args[arity - 1]);
            }
        }
        points.push((cx, cy));
        if cmd.eq_ignore_ascii_case(&'m') {
            start = (cx, cy);
            // implicit lineto after a moveto
            cmd = if rel { 'l' } else { 'L' };
        }
    }
    let (first, rest) = points.split_first()?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.0, first.1, first.0, first.1);
    for &(x, y) in rest {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    Some(BBox::new(x0, y0, x1 - x0, y1 - y0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE_BARS: &str = r##"<svg xmlns="http://www.w3.org/2000/svg" data-chart-type="bar" width="200" height="100">
  <text data-role="title" x="10" y="12">Sales</text>
  <text data-role="stub-header" x="10" y="95">Region</text>
  <g class="marks">
    <rect class="mark" data-series="Sales" data-category="North" data-value="3" x="10" y="20" width="40" height="10" fill="#FF0000"/>
    <rect class="mark" data-series="Sales" data-category="South" data-value="2.5" x="10" y="40" width="30" height="10" style="stroke: none; fill: rgb(0, 128, 0)"/>
    <rect class="mark" data-series="Sales" data-category="East" data-value="1" x="10" y="60" width="10" height="10" fill="#00f"/>
  </g>
  <text x="0" y="30" text-anchor="end">North</text>
</svg>"##;

    #[test]
    fn reads_three_bars() {
        let a = parse_svg_chart(THREE_BARS).unwrap();
        assert_eq!(a.chart_type, ChartType::Bar);
        assert_eq!(a.title, "Sales");
        assert_eq!(a.stub_header.as_deref(), Some("Region"));
        let hexes: Vec<&str> = a.marks.iter().map(|m| m.hex_color.as_str()).collect();
        assert_eq!(hexes, ["ff0000", "008000", "0000ff"]);
        assert_eq!(a.marks[1].value, "2.5".parse().unwrap());
        assert_eq!(a.marks[0].bbox, BBox::new(10.0, 20.0, 40.0, 10.0));
        assert_eq!(a.text_elements.len(), 3);
    }

    #[test]
    fn fill_normalization() {
        assert_eq!(normalize_fill("rgb(255,0,0)").as_deref(), Some("ff0000"));
        assert_eq!(normalize_fill("rgb(100%, 0%, 50%)").as_deref(), Some("ff0080"));
        assert_eq!(normalize_fill("#ABC").as_deref(), Some("aabbcc"));
        assert_eq!(normalize_fill("Teal").as_deref(), Some("008080"));
        assert_eq!(normalize_fill("none"), None);
        assert_eq!(normalize_fill("url(#grad)"), None);
        assert_eq!(normalize_fill("rgb(300,0,0)"), None);
    }

    #[test]
    fn missing_fill() {
        let svg = r#"<svg><rect data-series="a" data-value="1" x="0" y="0" width="1" height="1"/></svg>"#;
        assert!(matches!(parse_svg_chart(svg), Err(VdtError::MissingFill(_))));
        let none = r#"<svg><rect data-series="a" data-value="1" x="0" y="0" width="1" height="1" fill="none"/></svg>"#;
        assert!(matches!(parse_svg_chart(none), Err(VdtError::MissingFill(_))));
    }

    #[test]
    fn group_fill_is_inherited() {
        let svg = r#"<svg><g fill="red"><circle data-series="a" data-value="1" cx="5" cy="5" r="2"/></g></svg>"#;
        let a = parse_svg_chart(svg).unwrap();
        assert_eq!(a.marks[0].hex_color, "ff0000");
        assert_eq!(a.marks[0].bbox, BBox::new(3.0, 3.0, 4.0, 4.0));
    }

    #[test]
    fn unlabelled_mark() {
        let svg = r#"<svg><rect class="mark" data-value="1" x="0" y="0" width="1" height="1" fill="red"/></svg>"#;
        assert!(matches!(parse_svg_chart(svg), Err(VdtError::UnresolvableLabel(_))));
    }

    #[test]
    fn malformed_xml() {
        assert!(matches!(parse_svg_chart("<svg><rect></svg>"), Err(VdtError::Xml(_))));
    }

    #[test]
    fn path_geometry() {
        assert_eq!(path_bbox("M 10 10 L 20 30 Z"), Some(BBox::new(10.0, 10.0, 10.0, 20.0)));
        assert_eq!(path_bbox("m10,10 h5 v5 h-5 z"), Some(BBox::new(10.0, 10.0, 5.0, 5.0)));
        // pie wedge: center plus arc endpoints
        assert_eq!(path_bbox("M50 50 L50 10 A40 40 0 0 1 90 50 Z"), Some(BBox::new(50.0, 10.0, 40.0, 40.0)));
        assert_eq!(path_bbox(""), None);
    }
}
