//! Exact re-evaluation of `expr = number` claims inside reasoning text.

use once_cell::sync::Lazy;
use regex::Regex;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use super::ccr::CcrTrace;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithmeticCheck {
    pub expression: String,
    pub stated: Decimal,
    pub computed: Decimal,
    pub ok: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithmeticAudit {
    pub checks: Vec<ArithmeticCheck>,
    /// Text around `=` signs that looked arithmetic but could not be evaluated.
    pub skipped: Vec<String>,
}

impl ArithmeticAudit {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

pub fn verify_ccr_arithmetic(trace: &CcrTrace) -> ArithmeticAudit {
    verify_arithmetic(trace.text())
}

static STATED: Lazy<Regex> = Lazy::new(|| Regex::new(r"^[-−]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?%?").unwrap());

fn expr_char(c: char) -> bool {
    c.is_ascii_digit() || " .,()+-*/×÷−\t".contains(c)
}

/// Checks every `<expr> = <number>` in `text`. A claim holds when the
/// exact value is within half a unit of the stated number's last decimal.
pub fn verify_arithmetic(text: &str) -> ArithmeticAudit {
    let mut audit = ArithmeticAudit::default();
    for (eq, _) in text.match_indices('=') {
        let before = text[..eq].chars().next_back();
        let after_eq = &text[eq + 1..];
        if matches!(before, Some('=' | '<' | '>' | '!')) || after_eq.starts_with('=') {
            continue;
        }
        let rhs = after_eq.trim_start();
        let Some(m) = STATED.captures(rhs) else { continue };
        let stated_raw = m.get(0).unwrap().as_str();
        let decimals = m.get(1).map_or(0, |d| d.as_str().len()) as u32;
        let Some(stated) = parse_plain(stated_raw.trim_end_matches('%')) else { continue };

        let region_start =
            text[..eq].char_indices().rev().take_while(|(_, c)| expr_char(*c)).last().map_or(eq, |(i, _)| i);
        let region = &text[region_start..eq];
        if !region.chars().any(|c| c.is_ascii_digit()) {
            continue;
        }
        let claim = format!("{} = {}", region.trim(), stated_raw);
        let tokens = lex(region);
        let parsed = (0..tokens.len()).find_map(|i| {
            let slice = &tokens[i..];
            if !slice.iter().any(|t| matches!(t.tok, Tok::Op(_))) {
                return None;
            }
            let mut p = Parser { toks: slice, pos: 0 };
            let value = p.expr().ok()?;
            (p.pos == slice.len()).then(|| (slice[0].start, value))
        });
        let Some((offset, value)) = parsed else {
            if tokens.iter().any(|t| matches!(t.tok, Tok::Op(_))) {
                audit.skipped.push(claim);
            }
            continue;
        };
        let (Some(computed), Some(tolerance)) = (value, half_unit(decimals)) else {
            audit.skipped.push(claim);
            continue;
        };
        let ok = (computed - stated).abs() <= tolerance;
        audit.checks.push(ArithmeticCheck { expression: region[offset..].trim().to_string(), stated, computed, ok });
    }
    audit
}

fn half_unit(decimals: u32) -> Option<Decimal> {
    (decimals < 28).then(|| Decimal::new(5, decimals + 1))
}

fn parse_plain(s: &str) -> Option<Decimal> {
    let s = s.replace(',', "").replace('−', "-");
    s.parse().ok()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(Decimal),
    Op(char),
    Open,
    Close,
    Bad,
}

struct Lexed {
    tok: Tok,
    start: usize,
}

static NUMBER: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?").unwrap());

fn lex(region: &str) -> Vec<Lexed> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < region.len() {
        let rest = &region[i..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if let Some(m) = NUMBER.find(rest) {
            let tok = parse_plain(m.as_str()).map_or(Tok::Bad, Tok::Num);
            out.push(Lexed { tok, start: i });
            i += m.end();
            continue;
        }
        let tok = match c {
            '+' => Tok::Op('+'),
            '-' | '−' => Tok::Op('-'),
            '*' | '×' => Tok::Op('*'),
            '/' | '÷' => Tok::Op('/'),
            '(' => Tok::Open,
            ')' => Tok::Close,
            _ => Tok::Bad,
        };
        out.push(Lexed { tok, start: i });
        i += c.len_utf8();
    }
    out
}

struct Parser<'a> {
    toks: &'a [Lexed],
    pos: usize,
}

// Ok(None) is a well-formed expression whose value is undefined
// (division by zero or overflow).
type Eval = Result<Option<Decimal>, ()>;

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.tok)
    }

    fn expr(&mut self) -> Eval {
        let mut acc = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = match (acc, rhs) {
                (Some(a), Some(b)) if op == '+' => a.checked_add(b),
                (Some(a), Some(b)) => a.checked_sub(b),
                _ => None,
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Eval {
        let mut acc = self.factor()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = match (acc, rhs) {
                (Some(a), Some(b)) if op == '*' => a.checked_mul(b),
                (Some(a), Some(b)) => a.checked_div(b),
                _ => None,
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Eval {
        let tok = self.peek().ok_or(())?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Some(n)),
            Tok::Op('-') => Ok(self.factor()?.map(|v| -v)),
            Tok::Open => {
                let v = self.expr()?;
                if self.peek() != Some(Tok::Close) {
                    return Err(());
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(()),
        }
    }
}
