use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::HarnessError;
use crate::answer_eval::MetricReport;
use crate::prompt_kit::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Human-readable summary table.
    Table,
    /// One JSON line per sample.
    Records,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "records" => Ok(ReportFormat::Records),
            other => Err(HarnessError::Usage(format!("report format must be `table` or `records`, got {other:?}"))),
        }
    }
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{:.2}", x * 100.0))
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

pub fn emit_report(task: TaskKind, report: &MetricReport, fmt: ReportFormat) -> String {
    let mut out = String::new();
    match fmt {
        ReportFormat::Records => {
            for r in &report.per_sample {
                out.push_str(&serde_json::to_string(r).expect("records serialize"));
                out.push('\n');
            }
        }
        ReportFormat::Table if task == TaskKind::Fcqa => {
            out.push_str("| Aug. | Human | Avg. | N | Errors |\n");
            out.push_str("|------|-------|------|---|--------|\n");
            if report.n_samples > 0 {
                let split = |name: &str| report.splits.get(name).map(|s| s.accuracy);
                // the average of split accuracies; a run without splits falls back to overall accuracy
                let avg = report.split_average().or(report.relaxed_accuracy);
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    pct(split("augmented")),
                    pct(split("human")),
                    pct(avg),
                    report.n_samples,
                    report.n_errors
                );
            }
        }
        ReportFormat::Table => {
            out.push_str("| Task | N | Errors | Similarity |\n");
            out.push_str("|------|---|--------|------------|\n");
            if report.n_samples > 0 {
                let _ = writeln!(
                    out,
                    "| {task} | {} | {} | {} |",
                    report.n_samples,
                    report.n_errors,
                    num(report.mean_similarity)
                );
            }
        }
    }
    out
}

pub fn write_report(task: TaskKind, report: &MetricReport, fmt: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, emit_report(task, report, fmt)).map_err(|e| HarnessError::io(path, e))
}
