use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::task::FcqaCategory;
use super::PromptError;

const ANSWER_MARKER: &str = "the answer is";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CcrKind {
    OperandVisual,
    OperandPlain,
    Operator,
    Reasoning,
    Result,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcrElement {
    pub kind: CcrKind,
    /// Byte offsets into the trace text.
    pub span: (usize, usize),
}

/// Location of the last `The answer is X` sentence in a text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalAnswer<'a> {
    /// Start of the sentence.
    pub start: usize,
    /// End of `X`, before any terminal period.
    pub end: usize,
    pub answer: &'a str,
}

/// Finds the last case-insensitive `The answer is X`. X runs to the first
/// newline or to a period followed by whitespace or the end of the text.
pub fn find_final_answer(text: &str) -> Option<FinalAnswer<'_>> {
    let start = text.to_ascii_lowercase().rfind(ANSWER_MARKER)?;
    let after = start + ANSWER_MARKER.len();
    let rest = &text[after..];
    let lead = rest.len() - rest.trim_start_matches([' ', '\t']).len();
    let body = &rest[lead..];
    let mut stop = body.len();
    let mut chars = body.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '\n' || c == '\r' {
            stop = i;
            break;
        }
        if c == '.' && chars.peek().is_none_or(|(_, n)| n.is_whitespace()) {
            stop = i;
            break;
        }
    }
    let answer = body[..stop].trim_end();
    if answer.is_empty() {
        return None;
    }
    Some(FinalAnswer { start, end: after + lead + answer.len(), answer })
}

/// A chain-of-chart-reasoning answer with tagged element spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcrTrace {
    text: String,
    elements: Vec<CcrElement>,
    final_answer: String,
}

impl CcrTrace {
    /// Parses an untagged trace; only the result element is recognized.
    pub fn parse(text: &str) -> Result<Self, PromptError> {
        Self::annotate(text, &[])
    }

    /// Parses a trace and locates each tagged fragment, in order, in the text.
    /// A tagged `Result` must be exactly the final-answer sentence; an
    /// untagged one is added.
    pub fn annotate(text: &str, tagged: &[(CcrKind, &str)]) -> Result<Self, PromptError> {
        let fa = find_final_answer(text)
            .ok_or_else(|| PromptError::Parse(format!("no `The answer is X` sentence in {text:?}")))?;
        let tail = text[fa.end..].trim();
        if !(tail.is_empty() || tail == ".") {
            return Err(PromptError::Parse(format!("text continues after the final answer: {tail:?}")));
        }
        let result_span = (fa.start, fa.end);
        let mut elements = Vec::with_capacity(tagged.len() + 1);
        let mut cursor = 0;
        for &(kind, fragment) in tagged {
            if fragment.is_empty() {
                return Err(PromptError::Parse(format!("empty {kind:?} element")));
            }
            let at = text[cursor..]
                .find(fragment)
                .map(|i| i + cursor)
                .ok_or_else(|| PromptError::Parse(format!("{kind:?} element {fragment:?} not found in order")))?;
            let span = (at, at + fragment.len());
            if kind == CcrKind::Result && span != result_span {
                return Err(PromptError::Parse(format!("result element {fragment:?} is not the final answer")));
            }
            elements.push(CcrElement { kind, span });
            cursor = span.1;
        }
        if !elements.iter().any(|e| e.kind == CcrKind::Result) {
            if cursor > result_span.0 {
                return Err(PromptError::Parse("tagged elements overlap the final answer".into()));
            }
            elements.push(CcrElement { kind: CcrKind::Result, span: result_span });
        }
        Ok(CcrTrace { text: text.to_string(), elements, final_answer: fa.answer.to_string() })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn elements(&self) -> &[CcrElement] {
        &self.elements
    }

    pub fn final_answer(&self) -> &str {
        &self.final_answer
    }

    pub fn element_text(&self, e: &CcrElement) -> &str {
        &self.text[e.span.0..e.span.1]
    }

    pub fn kinds(&self) -> BTreeSet<CcrKind> {
        self.elements.iter().map(|e| e.kind).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CcrViolation {
    MissingElement(CcrKind),
}

/// Checks a trace against the element set of a category's CCR format.
///
/// When a format lists both operand kinds, either one satisfies the operand
/// requirement. When it lists operators, an operator element also carries
/// the reasoning step.
pub fn validate_ccr(category: FcqaCategory, trace: &CcrTrace) -> Vec<CcrViolation> {
    use CcrKind::*;
    let format = category.ccr_format();
    let present = trace.kinds();
    let listed = |k: CcrKind| format.contains(&k);
    let has = |k: CcrKind| present.contains(&k);
    let mut missing = Vec::new();

    match (listed(OperandVisual), listed(OperandPlain)) {
        (true, true) if !has(OperandVisual) && !has(OperandPlain) => missing.push(OperandVisual),
        (true, false) if !has(OperandVisual) => missing.push(OperandVisual),
        (false, true) if !has(OperandPlain) => missing.push(OperandPlain),
        _ => {}
    }
    if listed(Operator) && !has(Operator) {
        missing.push(Operator);
    }
    if listed(Reasoning) && !has(Reasoning) && !(listed(Operator) && has(Operator)) {
        missing.push(Reasoning);
    }
    if !has(Result) {
        missing.push(Result);
    }
    missing.into_iter().map(CcrViolation::MissingElement).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn final_answer_keeps_decimals() {
        let t = "The ratio is 39 / 53 = 0.7358. The answer is 0.7358.";
        let fa = find_final_answer(t).unwrap();
        assert_eq!(fa.answer, "0.7358");
        assert_eq!(&t[fa.start..fa.end], "The answer is 0.7358");
    }

    #[test]
    fn final_answer_takes_last_occurrence() {
        let fa = find_final_answer("the answer is 3. Wait. The Answer Is 4").unwrap();
        assert_eq!(fa.answer, "4");
        assert!(find_final_answer("The answer is .").is_none());
        assert!(find_final_answer("no marker").is_none());
    }

    #[test]
    fn bare_trace_is_numerical_retrieval() {
        let t = CcrTrace::parse("The answer is 5.").unwrap();
        assert_eq!(t.final_answer(), "5");
        assert!(validate_ccr(FcqaCategory::NumericalRetrieval, &t).is_empty());
        assert_eq!(
            validate_ccr(FcqaCategory::AddSubtract, &t),
            [
                CcrViolation::MissingElement(CcrKind::OperandPlain),
                CcrViolation::MissingElement(CcrKind::Operator),
                CcrViolation::MissingElement(CcrKind::Reasoning),
            ]
        );
    }

    #[test]
    fn trailing_text_rejected() {
        assert!(CcrTrace::parse("The answer is 5. And more words here").is_err());
        assert!(CcrTrace::parse("nothing").is_err());
    }

    #[test]
    fn annotate_finds_spans_in_order() {
        let text = "A is 2 and B is 3. So 2 + 3 = 5. The answer is 5.";
        let t =
            CcrTrace::annotate(text, &[(CcrKind::OperandPlain, "A is 2 and B is 3"), (CcrKind::Operator, "2 + 3 = 5")])
                .unwrap();
        let spans: Vec<&str> = t.elements().iter().map(|e| t.element_text(e)).collect();
        assert_eq!(spans, ["A is 2 and B is 3", "2 + 3 = 5", "The answer is 5"]);
        assert!(
            CcrTrace::annotate(text, &[(CcrKind::Operator, "2 + 3 = 5"), (CcrKind::OperandPlain, "A is 2")]).is_err()
        );
        assert!(CcrTrace::annotate(text, &[(CcrKind::Result, "The answer")]).is_err());
    }
}
