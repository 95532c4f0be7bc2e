use std::collections::{BTreeMap, HashSet};

use once_cell::sync::Lazy;

use super::kdtree::KdTree;
use super::VdtError;

const CSS3_PALETTE: &str = include_str!("../../resources/css3.palette");
const DEFAULT_OVERRIDES: &str = include_str!("../../resources/overrides.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    /// Parses exactly six hex digits (no leading `#`).
    pub fn from_hex(hex: &str) -> Result<Rgb, VdtError> {
        if hex.len() != 6 || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(VdtError::InvalidHex(hex.to_string()));
        }
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).expect("validated hex");
        Ok(Rgb(byte(0), byte(2), byte(4)))
    }

    pub fn to_hex(self) -> String {
        format!("{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }

    pub fn distance_sq(self, other: Rgb) -> i32 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).pow(2)).sum()
    }

    pub(super) fn channel(self, axis: usize) -> u8 {
        [self.0, self.1, self.2][axis]
    }

    pub(super) fn as_array(self) -> [i32; 3] {
        [self.0 as i32, self.1 as i32, self.2 as i32]
    }
}

/// Named colors with a nearest-neighbour index over RGB space.
pub struct ColorPalette {
    entries: Vec<(String, Rgb)>,
    tree: KdTree,
}

impl std::fmt::Debug for ColorPalette {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ColorPalette").field("entries", &self.entries.len()).finish()
    }
}

static CSS3: Lazy<ColorPalette> = Lazy::new(|| ColorPalette::parse(CSS3_PALETTE).expect("bundled palette"));

impl ColorPalette {
    /// The 147 CSS3 color keywords.
    pub fn css3() -> &'static ColorPalette {
        &CSS3
    }

    pub fn from_entries(entries: Vec<(String, Rgb)>) -> Result<Self, VdtError> {
        if entries.is_empty() {
            return Err(VdtError::Palette("palette is empty".into()));
        }
        let mut seen = HashSet::new();
        for (name, _) in &entries {
            if name.trim().is_empty() || name.trim() != name {
                return Err(VdtError::Palette(format!("bad color name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(VdtError::Palette(format!("duplicate color name {name:?}")));
            }
        }
        let points: Vec<Rgb> = entries.iter().map(|(_, rgb)| *rgb).collect();
        let tree = KdTree::build(&points);
        Ok(ColorPalette { entries, tree })
    }

    /// Parses `name #RRGGBB` lines; `#` starts a comment line. Names may
    /// contain spaces, the color is the last token.
    pub fn parse(text: &str) -> Result<Self, VdtError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || VdtError::Palette(format!("line {}: expected `name #RRGGBB`", lineno + 1));
            let (name, hex) = line.rsplit_once(char::is_whitespace).ok_or_else(bad)?;
            let hex = hex.strip_prefix('#').ok_or_else(bad)?;
            entries.push((name.trim().to_string(), Rgb::from_hex(hex).map_err(|_| bad())?));
        }
        Self::from_entries(entries)
    }

    /// CSS3 keywords plus the entries of a palette file; later names replace
    /// earlier ones.
    pub fn css3_extended(text: &str) -> Result<Self, VdtError> {
        let extra = Self::parse(text)?;
        let mut merged: Vec<(String, Rgb)> =
            Self::css3().entries.iter().filter(|(n, _)| !extra.entries.iter().any(|(m, _)| m == n)).cloned().collect();
        merged.extend(extra.entries);
        Self::from_entries(merged)
    }

    pub fn entries(&self) -> &[(String, Rgb)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Closest name by Euclidean RGB distance; ties go to the
    /// lexicographically smallest name.
    pub fn nearest(&self, rgb: Rgb) -> &str {
        let idx = self.tree.nearest(rgb, |a, b| self.entries[a].0 < self.entries[b].0).expect("palette is non-empty");
        &self.entries[idx].0
    }

    /// Linear scan under an arbitrary distance, same tie-break as [`nearest`].
    ///
    /// [`nearest`]: ColorPalette::nearest
    pub fn nearest_by<D: PartialOrd>(&self, rgb: Rgb, distance: impl Fn(Rgb, Rgb) -> D) -> &str {
        let mut best: Option<(D, &str)> = None;
        for (name, c) in &self.entries {
            let d = distance(rgb, *c);
            let replace = match &best {
                None => true,
                Some((bd, bn)) => d < *bd || (d == *bd && name.as_str() < *bn),
            };
            if replace {
                best = Some((d, name));
            }
        }
        best.expect("palette is non-empty").1
    }

    pub fn rgb_of(&self, name: &str) -> Option<Rgb> {
        self.entries.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, c)| *c)
    }
}

/// Exact hex to name mappings that win over nearest-palette lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OverrideTable {
    mappings: BTreeMap<String, String>,
}

static DEFAULT_OVERRIDE_TABLE: Lazy<OverrideTable> =
    Lazy::new(|| OverrideTable::parse(DEFAULT_OVERRIDES).expect("bundled overrides"));

impl OverrideTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The curated table shipped with the crate.
    pub fn bundled() -> &'static OverrideTable {
        &DEFAULT_OVERRIDE_TABLE
    }

    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, VdtError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut mappings = BTreeMap::new();
        for (hex, name) in pairs {
            let hex = hex.as_ref();
            Rgb::from_hex(hex)?;
            let name = name.into();
            if name.trim().is_empty() {
                return Err(VdtError::Palette(format!("override for {hex} has an empty name")));
            }
            mappings.insert(hex.to_ascii_lowercase(), name.trim().to_string());
        }
        Ok(OverrideTable { mappings })
    }

    /// Parses `RRGGBB name` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, VdtError> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (hex, name) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| VdtError::Palette(format!("line {}: expected `RRGGBB name`", lineno + 1)))?;
            pairs.push((hex.to_string(), name.to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn get(&self, hex: &str) -> Option<&str> {
        self.mappings.get(&hex.to_ascii_lowercase()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.mappings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Natural-language name for a 6-digit hex color: the override if one
/// exists, otherwise the nearest palette entry.
pub fn nearest_color(hex: &str, palette: &ColorPalette, overrides: &OverrideTable) -> Result<String, VdtError> {
    let rgb = Rgb::from_hex(hex)?;
    if let Some(name) = overrides.get(hex) {
        return Ok(name.to_string());
    }
    Ok(palette.nearest(rgb).to_string())
}
