//! Slow reference implementations for cross-checking.
#![allow(dead_code)]

use chartqa_core::chart_data::{DataTable, VisualDataTable};
use chartqa_core::vdt_builder::{ColorPalette, Rgb};
use rust_decimal::prelude::ToPrimitive;

/// Sum after sorting ascending, so equal multisets give equal bits.
pub fn sorted_sum(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.iter().fold(0.0, |acc, x| acc + x)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn rel(p: f64, g: f64) -> f64 {
    let denom = if g.abs() > 1e-9 { g.abs() } else { 1e-9 };
    let d = (p - g).abs() / denom;
    if d > 1.0 {
        1.0
    } else {
        d
    }
}

/// Minimum total over every pairing of the padded sides.
fn brute_min(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> (f64, Vec<usize>) {
    let n = rows.max(cols);
    let mut best = (f64::INFINITY, Vec::new());
    for perm in permutations(n) {
        let total = sorted_sum(
            perm.iter().enumerate().map(|(i, &j)| if i < rows && j < cols { cost(i, j) } else { 1.0 }).collect(),
        );
        if total < best.0 {
            best = (total, perm);
        }
    }
    best
}

pub fn rnss_brute(pred: &[f64], gold: &[f64]) -> f64 {
    let n = pred.len().max(gold.len());
    if n == 0 {
        return 1.0;
    }
    1.0 - brute_min(pred.len(), gold.len(), |i, j| rel(pred[i], gold[j])).0 / n as f64
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

pub fn nl(a: &str, b: &str) -> f64 {
    let m = a.chars().count().max(b.chars().count());
    if m == 0 {
        0.0
    } else {
        levenshtein(a, b) as f64 / m as f64
    }
}

/// (key, raw value) pairs.
pub type Entry = (String, String);

fn numeric(s: &str) -> Option<f64> {
    chartqa_core::chart_data::parse_number(s).and_then(|d| d.to_f64())
}

pub fn entry_sim(p: &Entry, g: &Entry) -> f64 {
    let key = 1.0 - nl(&p.0, &g.0);
    let value = match (numeric(&p.1), numeric(&g.1)) {
        (Some(a), Some(b)) => 1.0 - rel(a, b),
        _ => 1.0 - nl(&p.1, &g.1),
    };
    key * value
}

/// (precision, recall, f1) from the cheapest pairing.
pub fn rms_brute(pred: &[Entry], gold: &[Entry]) -> (f64, f64, f64) {
    if pred.is_empty() && gold.is_empty() {
        return (1.0, 1.0, 1.0);
    }
    let (_, perm) = brute_min(pred.len(), gold.len(), |i, j| 1.0 - entry_sim(&pred[i], &gold[j]));
    let total = sorted_sum(
        perm.iter()
            .enumerate()
            .filter(|&(i, &j)| i < pred.len() && j < gold.len())
            .map(|(i, &j)| entry_sim(&pred[i], &gold[j]))
            .collect(),
    );
    let p = if pred.is_empty() { 0.0 } else { total / pred.len() as f64 };
    let r = if gold.is_empty() { 0.0 } else { total / gold.len() as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

pub fn entries_of(t: &DataTable) -> Vec<Entry> {
    let mut out = Vec::new();
    for row in t.rows() {
        for (col, cell) in t.column_headers().iter().zip(&row.cells) {
            out.push((format!("{} {}", row.label, col), cell.raw().to_string()));
        }
    }
    out
}

/// Scan of every palette entry; ties go to the smaller name.
pub fn nearest_scan(palette: &ColorPalette, c: Rgb) -> String {
    let mut best: Option<(i64, &str)> = None;
    for (name, rgb) in palette.entries() {
        let d = [(c.0, rgb.0), (c.1, rgb.1), (c.2, rgb.2)]
            .iter()
            .map(|&(a, b)| (i64::from(a) - i64::from(b)).pow(2))
            .sum::<i64>();
        best = match best {
            Some((bd, bn)) if bd < d || (bd == d && bn <= name.as_str()) => Some((bd, bn)),
            _ => Some((d, name)),
        };
    }
    best.unwrap().1.to_string()
}

pub fn numbers_of(v: &VisualDataTable) -> Vec<f64> {
    v.table().rows().iter().flat_map(|r| r.cells.iter().filter_map(|c| numeric(c.raw()))).collect()
}
