//! Experiment harness: dataset loading, runs with a resumable ledger,
//! reports, and the synthetic chart corpus.

mod config;
mod dataset;
mod ledger;
mod report;
mod run;
mod synth;

pub use config::{build_backend, build_client, BackendSpec, RunConfig, Split};
pub use dataset::{load_dataset, ChartInput, Sample};
pub use ledger::Ledger;
pub use report::{emit_report, write_report, ReportFormat};
pub use run::{prepare_prompt, run_experiment, select_samples, LEDGER_FILE, REPORT_RECORDS_FILE, REPORT_TABLE_FILE};
pub use synth::{generate_synthetic_charts, ChartEntry, Manifest, MANIFEST_FILE};

use std::path::Path;

use thiserror::Error;

use crate::chart_data::ChartDataError;
use crate::llm_gateway::GatewayError;
use crate::prompt_kit::PromptError;
use crate::vdt_builder::VdtError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{file}{}: {message}", .index.map(|i| format!(" record {i}")).unwrap_or_default())]
    Schema { file: String, index: Option<usize>, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Vdt(#[from] VdtError),
    #[error(transparent)]
    ChartData(#[from] ChartDataError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        HarnessError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    pub(crate) fn schema(file: &Path, index: Option<usize>, message: impl Into<String>) -> Self {
        HarnessError::Schema { file: file.display().to_string(), index, message: message.into() }
    }
}
