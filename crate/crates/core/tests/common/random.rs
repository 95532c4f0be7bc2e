//! Seeded random tables for the fixed-count checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chartqa_core::chart_data::{Cell, DataTable, Orientation, Row, VisualDataTable};
use chartqa_core::vdt_builder::ColorPalette;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "Peru",
    "Chile",
    "North",
    "South",
    "Share",
    "Men",
    "Women",
    "2019",
    "Q1",
    "Net %",
    "U.S.",
    "Côte d'Ivoire",
    "Don't know",
    "Ages 18-29",
    "$ bn",
    "São Paulo",
    "Other",
    "Total",
];

fn label(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn cell(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..6) {
        0 => label(rng),
        1 => format!("{}%", rng.gen_range(0..100)),
        2 => "-".into(),
        _ => rust_decimal::Decimal::new(rng.gen_range(-99_999..99_999), rng.gen_range(0..4)).to_string(),
    }
}

fn distinct(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let l = label(rng);
        if seen.insert(l.clone()) {
            out.push(l);
        }
    }
    out
}

pub fn random_vdt(rng: &mut ChaCha8Rng) -> VisualDataTable {
    let (n_cols, n_rows) = (rng.gen_range(1..=4), rng.gen_range(1..=6));
    let cols = distinct(rng, n_cols);
    let rows = distinct(rng, n_rows);
    let table_rows = rows.iter().map(|r| Row::new(r.clone(), (0..cols.len()).map(|_| Cell::new(cell(rng))))).collect();
    let vertical = rng.gen_bool(0.5);
    let names = ColorPalette::css3().entries();
    let keys = if vertical { &cols } else { &rows };
    let mut colors = BTreeMap::new();
    for k in keys {
        if rng.gen_bool(0.7) {
            colors.insert(k.clone(), names.choose(rng).unwrap().0.clone());
        }
    }
    let orientation = if vertical { Orientation::Vertical } else { Orientation::Horizontal };
    VisualDataTable::new(orientation, DataTable::new(None, label(rng), cols, table_rows).unwrap(), colors).unwrap()
}
