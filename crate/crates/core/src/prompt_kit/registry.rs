use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use super::ccr::{CcrKind, CcrTrace};
use super::task::{CsSource, DemoCategory, LcqaCategory, SummaryType, TaskKind};
use super::PromptError;

const FCQA_DEMOS: &str = include_str!("../../resources/demos/fcqa.toml");
const LCQA_DEMOS: &str = include_str!("../../resources/demos/lcqa.toml");
const CS_DEMOS: &str = include_str!("../../resources/demos/cs.toml");

pub const DEMO_FORMAT_VERSION: u32 = 1;
pub const LCQA_MIN_WORDS: usize = 30;
pub const LCQA_MAX_WORDS: usize = 220;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub task: TaskKind,
    /// 1-based position in its resource file.
    pub index: usize,
    pub category: DemoCategory,
    pub input_block: String,
    pub gold_output: String,
    pub ccr: Option<CcrTrace>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoFile {
    version: u32,
    task: String,
    demo: Vec<DemoRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoRecord {
    index: usize,
    category: String,
    sub_source: Option<CsSource>,
    input: String,
    output: String,
    #[serde(default)]
    element: Vec<ElementRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRecord {
    kind: CcrKind,
    text: String,
}

/// Parses a demonstration resource file. CS files hold both sub-sources.
pub fn parse_demonstrations(text: &str) -> Result<Vec<Demonstration>, PromptError> {
    let file: DemoFile = toml::from_str(text).map_err(|e| PromptError::Resource(e.to_string()))?;
    if file.version != DEMO_FORMAT_VERSION {
        return Err(PromptError::Resource(format!("unsupported demonstration format version {}", file.version)));
    }
    let mut out = Vec::with_capacity(file.demo.len());
    for (pos, rec) in file.demo.into_iter().enumerate() {
        let bad = |msg: String| PromptError::Resource(format!("demo {}: {msg}", pos + 1));
        if rec.index != pos + 1 {
            return Err(bad(format!("index {} out of sequence", rec.index)));
        }
        if rec.input.trim().is_empty() || rec.output.trim().is_empty() {
            return Err(bad("empty input or output".into()));
        }
        let (task, category) = match (file.task.as_str(), rec.sub_source) {
            ("fcqa", None) => (TaskKind::Fcqa, DemoCategory::Fcqa(rec.category.parse()?)),
            ("lcqa", None) => (TaskKind::Lcqa, DemoCategory::Lcqa(rec.category.parse::<LcqaCategory>()?)),
            ("cs", Some(src)) => (TaskKind::Cs(src), DemoCategory::Cs(rec.category.parse::<SummaryType>()?)),
            ("cs", None) => return Err(bad("CS demonstrations need a sub_source".into())),
            (t, _) => return Err(bad(format!("unexpected task {t:?} or sub_source"))),
        };
        let ccr = if task == TaskKind::Fcqa {
            let tagged: Vec<(CcrKind, &str)> = rec.element.iter().map(|e| (e.kind, e.text.as_str())).collect();
            Some(CcrTrace::annotate(&rec.output, &tagged).map_err(|e| bad(e.to_string()))?)
        } else if !rec.element.is_empty() {
            return Err(bad("only FCQA demonstrations carry CCR elements".into()));
        } else {
            None
        };
        out.push(Demonstration {
            task,
            index: rec.index,
            category,
            input_block: rec.input,
            gold_output: rec.output,
            ccr,
        });
    }
    Ok(out)
}

static BUILTIN: Lazy<Vec<Demonstration>> = Lazy::new(|| {
    [FCQA_DEMOS, LCQA_DEMOS, CS_DEMOS]
        .into_iter()
        .flat_map(|src| parse_demonstrations(src).expect("bundled demonstrations"))
        .collect()
});

/// The shipped demonstrations for a task, in resource order.
pub fn builtin_demonstrations(task: TaskKind) -> Vec<Demonstration> {
    BUILTIN.iter().filter(|d| d.task == task).cloned().collect()
}

/// Every shipped demonstration across all tasks.
pub fn all_builtin_demonstrations() -> &'static [Demonstration] {
    &BUILTIN
}

/// Takes `n` demonstrations in order, wrapping around when `n` exceeds the
/// list.
pub fn select_shots(demos: &[Demonstration], n: usize) -> Vec<Demonstration> {
    if demos.is_empty() {
        return Vec::new();
    }
    demos.iter().cycle().take(n).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LintIssue {
    WrongTask { index: usize },
    AnswerLength { index: usize, words: usize },
    Coverage { expected: BTreeMap<String, usize>, found: BTreeMap<String, usize> },
    MissingCcr { index: usize },
}

fn expected_coverage(task: TaskKind) -> BTreeMap<String, usize> {
    let names: Vec<&str> = match task {
        TaskKind::Fcqa => vec![
            "ComplexRetrieval",
            "AddSubtract",
            "DivideMultiply",
            "VisualReasoning",
            "CompositionalReasoning",
            "Boolean",
        ],
        TaskKind::Lcqa => {
            vec!["DescribeAndSummary", "DescribeAndSummary", "Comparative", "Comparative", "Discover", "Discover"]
        }
        TaskKind::Cs(_) => SummaryType::ALL.iter().map(|s| s.as_str()).collect(),
    };
    let mut counts = BTreeMap::new();
    for n in names {
        *counts.entry(n.to_string()).or_insert(0) += 1;
    }
    counts
}

/// Lints a demonstration set: LCQA answers must be 30 to 220 words, and the
/// category mix must match the shipped distribution for the task.
pub fn lint_demonstrations(task: TaskKind, demos: &[Demonstration]) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    for d in demos {
        if d.task != task {
            issues.push(LintIssue::WrongTask { index: d.index });
        }
        if task == TaskKind::Fcqa && d.ccr.is_none() {
            issues.push(LintIssue::MissingCcr { index: d.index });
        }
        if task == TaskKind::Lcqa {
            let words = d.gold_output.split_whitespace().count();
            if !(LCQA_MIN_WORDS..=LCQA_MAX_WORDS).contains(&words) {
                issues.push(LintIssue::AnswerLength { index: d.index, words });
            }
        }
    }
    let mut found = BTreeMap::new();
    for d in demos {
        *found.entry(d.category.as_str().to_string()).or_insert(0) += 1;
    }
    let expected = expected_coverage(task);
    if found != expected {
        issues.push(LintIssue::Coverage { expected, found });
    }
    issues
}
