use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::assignment::{canonical_sum, min_cost_assignment};
use crate::chart_data::{collect_numbers, Cell, DataTable};

/// Floor of the denominator in relative distances.
pub const EPSILON: f64 = 1e-9;

/// Edit distance over characters divided by the longer length; 0 for two
/// empty strings.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    strsim::levenshtein(a, b) as f64 / longest as f64
}

/// `min(1, |p - g| / max(|g|, EPSILON))`.
pub fn relative_distance(pred: f64, gold: f64) -> f64 {
    ((pred - gold).abs() / gold.abs().max(EPSILON)).min(1.0)
}

fn to_f64(d: Decimal) -> f64 {
    d.to_f64().unwrap_or(f64::NAN)
}

/// Cost of the cheapest one-to-one pairing, padding the shorter side with
/// unit-cost dummies.
fn padded_min_cost(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let n = rows.max(cols);
    let matrix: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i < rows && j < cols { cost(i, j) } else { 1.0 }).collect()).collect();
    min_cost_assignment(&matrix).into_iter().enumerate().filter(|&(i, j)| i < rows && j < cols).collect()
}

/// Relative number set similarity between the numeric cells of two tables.
pub fn rnss(pred: &DataTable, gold: &DataTable) -> f64 {
    let p: Vec<f64> = collect_numbers(pred).into_iter().map(to_f64).collect();
    let g: Vec<f64> = collect_numbers(gold).into_iter().map(to_f64).collect();
    rnss_values(&p, &g)
}

pub fn rnss_values(pred: &[f64], gold: &[f64]) -> f64 {
    let n = pred.len().max(gold.len());
    if n == 0 {
        return 1.0;
    }
    let pairs = padded_min_cost(pred.len(), gold.len(), |i, j| relative_distance(pred[i], gold[j]));
    let unmatched = n - pairs.len();
    let costs = pairs.iter().map(|&(i, j)| relative_distance(pred[i], gold[j])).chain((0..unmatched).map(|_| 1.0));
    1.0 - canonical_sum(costs) / n as f64
}

/// One (row, column, value) entry of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub key: String,
    pub value: Cell,
}

pub fn table_entries(t: &DataTable) -> Vec<TableEntry> {
    t.entries().map(|(row, col, cell)| TableEntry { key: format!("{row} {col}"), value: cell.clone() }).collect()
}

/// Key similarity times value similarity. Values compare by relative
/// distance when both are numeric, by edit distance otherwise.
pub fn entry_similarity(p: &TableEntry, g: &TableEntry) -> f64 {
    let key = 1.0 - normalized_levenshtein(&p.key, &g.key);
    let value = match (p.value.numeric(), g.value.numeric()) {
        (Some(a), Some(b)) => 1.0 - relative_distance(to_f64(a), to_f64(b)),
        _ => 1.0 - normalized_levenshtein(p.value.raw(), g.value.raw()),
    };
    key * value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_total(total: f64, n_pred: usize, n_gold: usize) -> Prf {
        if n_pred == 0 && n_gold == 0 {
            return Prf { precision: 1.0, recall: 1.0, f1: 1.0 };
        }
        let precision = if n_pred == 0 { 0.0 } else { total / n_pred as f64 };
        let recall = if n_gold == 0 { 0.0 } else { total / n_gold as f64 };
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { precision, recall, f1 }
    }
}

/// Relative mapping similarity of two tables as precision, recall and F1
/// over an optimal one-to-one matching of entries.
pub fn rms_f1(pred: &DataTable, gold: &DataTable) -> Prf {
    rms_entries(&table_entries(pred), &table_entries(gold))
}

pub fn rms_entries(pred: &[TableEntry], gold: &[TableEntry]) -> Prf {
    let pairs = padded_min_cost(pred.len(), gold.len(), |i, j| 1.0 - entry_similarity(&pred[i], &gold[j]));
    let total = canonical_sum(pairs.iter().map(|&(i, j)| entry_similarity(&pred[i], &gold[j])));
    Prf::from_total(total, pred.len(), gold.len())
}
