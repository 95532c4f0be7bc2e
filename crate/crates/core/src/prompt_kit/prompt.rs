use serde::{Deserialize, Serialize};

use super::registry::{builtin_demonstrations, select_shots, Demonstration};
use super::task::TaskKind;
use super::PromptError;

pub const FCQA_INSTRUCTION: &str = "Answer the following question step by step.";
pub const LCQA_INSTRUCTION: &str = "Answer the following question step by step by a single paragraph.";
pub const CS_INSTRUCTION: &str = "Summarize the trends in the chart step by step and write the summary.";

pub fn default_instruction(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Fcqa => FCQA_INSTRUCTION,
        TaskKind::Lcqa => LCQA_INSTRUCTION,
        TaskKind::Cs(_) => CS_INSTRUCTION,
    }
}

/// Input and output labels of a prompt block.
pub fn block_labels(task: TaskKind) -> (&'static str, &'static str) {
    match task {
        TaskKind::Fcqa | TaskKind::Lcqa => ("Question:", "Answer:"),
        TaskKind::Cs(_) => ("Input:", "Summary:"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptMode {
    ZeroShot,
    FewShot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub task: TaskKind,
    pub mode: PromptMode,
    pub demonstrations: Vec<Demonstration>,
    pub instruction: String,
    pub target_input: String,
    /// Rendered table placed before the target input.
    pub table: Option<String>,
    /// Demonstration count replacing the task default in few-shot mode.
    pub shots: Option<usize>,
}

impl PromptSpec {
    pub fn zero_shot(task: TaskKind, target_input: impl Into<String>) -> Self {
        PromptSpec {
            task,
            mode: PromptMode::ZeroShot,
            demonstrations: Vec::new(),
            instruction: default_instruction(task).to_string(),
            target_input: target_input.into(),
            table: None,
            shots: None,
        }
    }

    /// Few-shot spec over the builtin demonstrations.
    pub fn few_shot(task: TaskKind, target_input: impl Into<String>) -> Self {
        PromptSpec {
            mode: PromptMode::FewShot,
            demonstrations: builtin_demonstrations(task),
            ..Self::zero_shot(task, target_input)
        }
    }

    pub fn new(task: TaskKind, mode: PromptMode, target_input: impl Into<String>) -> Self {
        match mode {
            PromptMode::ZeroShot => Self::zero_shot(task, target_input),
            PromptMode::FewShot => Self::few_shot(task, target_input),
        }
    }

    pub fn with_table(mut self, table: impl Into<String>) -> Self {
        self.table = Some(table.into());
        self
    }

    /// Resizes the demonstration list to `n`, wrapping around the builtin
    /// order. No effect on zero-shot specs.
    pub fn with_shots(mut self, n: usize) -> Self {
        if self.mode == PromptMode::FewShot {
            self.demonstrations = select_shots(&builtin_demonstrations(self.task), n);
            self.shots = Some(n);
        }
        self
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        let violation = |msg: String| Err(PromptError::SpecInvariantViolation(msg));
        if self.instruction.trim().is_empty() || self.instruction.contains('\n') {
            return violation("instruction must be a single non-empty line".into());
        }
        if self.target_input.trim().is_empty() {
            return violation("target input is empty".into());
        }
        if let Some(d) = self.demonstrations.iter().find(|d| d.task != self.task) {
            return violation(format!("demonstration {} belongs to {}, not {}", d.index, d.task, self.task));
        }
        let n = self.demonstrations.len();
        match (self.mode, self.shots) {
            (PromptMode::ZeroShot, _) if n > 0 => violation(format!("zero-shot spec carries {n} demonstrations")),
            (PromptMode::ZeroShot, Some(_)) => violation("shot count set on a zero-shot spec".into()),
            (PromptMode::FewShot, Some(0)) => violation("shot count must be positive".into()),
            (PromptMode::FewShot, Some(k)) if k != n => violation(format!("expected {k} demonstrations, got {n}")),
            (PromptMode::FewShot, None) if n != self.task.default_shots() => violation(format!(
                "few-shot {} needs exactly {} demonstrations, got {n}",
                self.task,
                self.task.default_shots()
            )),
            _ => Ok(()),
        }
    }
}

/// Renders the prompt: instruction, blank line, demonstration blocks
/// separated by blank lines, then the target block with an empty answer slot.
pub fn assemble_prompt(spec: &PromptSpec) -> Result<String, PromptError> {
    spec.validate()?;
    let (input_label, output_label) = block_labels(spec.task);
    let mut blocks = Vec::with_capacity(spec.demonstrations.len() + 2);
    blocks.push(spec.instruction.clone());
    for d in &spec.demonstrations {
        blocks.push(format!("{input_label} {}\n{output_label} {}", d.input_block, d.gold_output));
    }
    let mut target = String::new();
    if let Some(table) = &spec.table {
        target.push_str("Table: ");
        target.push_str(table);
        target.push('\n');
    }
    target.push_str(&format!("{input_label} {}\n{output_label}", spec.target_input));
    blocks.push(target);
    Ok(blocks.join("\n\n"))
}
