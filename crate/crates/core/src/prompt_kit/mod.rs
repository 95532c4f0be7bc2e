//! Few-shot prompt construction: task taxonomy, chain-of-chart-reasoning
//! traces, the bundled demonstrations and prompt assembly.

mod arithmetic;
mod ccr;
mod classify;
mod prompt;
mod registry;
mod task;

pub use arithmetic::{verify_arithmetic, verify_ccr_arithmetic, ArithmeticAudit, ArithmeticCheck};
pub use ccr::{find_final_answer, validate_ccr, CcrElement, CcrKind, CcrTrace, CcrViolation, FinalAnswer};
pub use classify::{classify_fcqa_question, QuestionClassifier};
pub use prompt::{
    assemble_prompt, block_labels, default_instruction, PromptMode, PromptSpec, CS_INSTRUCTION, FCQA_INSTRUCTION,
    LCQA_INSTRUCTION,
};
pub use registry::{
    all_builtin_demonstrations, builtin_demonstrations, lint_demonstrations, parse_demonstrations, select_shots,
    Demonstration, LintIssue, LCQA_MAX_WORDS, LCQA_MIN_WORDS,
};
pub use task::{CsSource, DemoCategory, FcqaCategory, LcqaCategory, SummaryType, TaskKind};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("prompt spec invariant violated: {0}")]
    SpecInvariantViolation(String),
    #[error("CCR parse error: {0}")]
    Parse(String),
    #[error("resource file: {0}")]
    Resource(String),
    #[error("unknown {what} {name:?}")]
    UnknownName { what: &'static str, name: String },
}
