use std::str::FromStr;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::chart_data::parse_number;
use crate::prompt_kit::find_final_answer;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum AnswerKind {
    Numeric(Decimal),
    Boolean(bool),
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedAnswer {
    pub raw: String,
    pub kind: AnswerKind,
}

impl ExtractedAnswer {
    /// Classifies an already-isolated answer string.
    pub fn from_raw(raw: &str) -> Self {
        let raw = clean(raw).to_string();
        let kind = match raw.to_ascii_lowercase().as_str() {
            "yes" | "true" => AnswerKind::Boolean(true),
            "no" | "false" => AnswerKind::Boolean(false),
            _ => parse_number(&raw).map_or(AnswerKind::Text, AnswerKind::Numeric),
        };
        ExtractedAnswer { raw, kind }
    }
}

const QUOTES: &[char] = &['"', '\'', '“', '”', '‘', '’', '`'];
const TRAILING: &[char] = &['.', ',', ';', ':', '!', '?'];

fn clean(s: &str) -> &str {
    let mut s = s.trim();
    loop {
        let next = s.trim_matches(QUOTES).trim_end_matches(TRAILING).trim();
        if next == s {
            return s;
        }
        s = next;
    }
}

/// Pulls the final answer out of a completion: the last `The answer is X`,
/// else the last non-empty line.
pub fn extract_final_answer(completion: &str) -> ExtractedAnswer {
    if let Some(fa) = find_final_answer(completion) {
        return ExtractedAnswer::from_raw(fa.answer);
    }
    let last = completion.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("");
    ExtractedAnswer::from_raw(last)
}

pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Numeric answers match within `tol` relative to gold, inclusive; a zero
/// gold needs an exact match. Anything else compares as trimmed,
/// case-insensitive text.
pub fn relaxed_match(pred: &ExtractedAnswer, gold: &str, tol: f64) -> bool {
    let gold_answer = ExtractedAnswer::from_raw(gold);
    match (&pred.kind, &gold_answer.kind) {
        (AnswerKind::Numeric(p), AnswerKind::Numeric(g)) => {
            if g.is_zero() {
                return p.is_zero();
            }
            // f64 Display prints the shortest round-tripping decimal
            let Ok(tol) = Decimal::from_str(&format!("{}", tol.max(0.0))) else {
                return false;
            };
            (*p - *g).abs() <= tol * g.abs()
        }
        (AnswerKind::Boolean(p), AnswerKind::Boolean(g)) => p == g,
        _ => pred.raw.trim().to_lowercase() == gold_answer.raw.trim().to_lowercase(),
    }
}
