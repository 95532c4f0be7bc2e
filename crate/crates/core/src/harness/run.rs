use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::dataset::{load_dataset, ChartInput, Sample};
use super::ledger::Ledger;
use super::report::{write_report, ReportFormat};
use super::HarnessError;
use crate::answer_eval::{extract_final_answer, relaxed_match, text_similarity, EvalRecord, MetricReport};
use crate::chart_data::{render_vdt_text, Orientation, VisualDataTable};
use crate::llm_gateway::{CompletionRequest, LlmClient};
use crate::prompt_kit::{assemble_prompt, PromptSpec, TaskKind};
use crate::vdt_builder::{build_vdt, ColorPalette, OverrideTable};

pub const LEDGER_FILE: &str = "ledger.jsonl";
pub const REPORT_TABLE_FILE: &str = "report.txt";
pub const REPORT_RECORDS_FILE: &str = "report.jsonl";

/// Applies the split filter, then a seeded shuffle and the sample cap when a
/// limit is set.
pub fn select_samples(cfg: &RunConfig, samples: Vec<Sample>) -> Vec<Sample> {
    let split = cfg.effective_split();
    let mut selected: Vec<Sample> = samples.into_iter().filter(|s| split.admits(s.split)).collect();
    if let Some(limit) = cfg.limit {
        selected.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
        selected.truncate(limit);
    }
    selected
}

/// The prompt for one sample. Factoid samples with chart content get its
/// visual data table ahead of the question.
pub fn prepare_prompt(cfg: &RunConfig, sample: &Sample) -> Result<String, HarnessError> {
    let mut spec = PromptSpec::new(cfg.task, cfg.mode, sample.input.clone());
    if let Some(n) = cfg.shots {
        spec = spec.with_shots(n);
    }
    if cfg.task == TaskKind::Fcqa {
        let table = match &sample.chart {
            Some(ChartInput::Annotation(a)) => {
                Some(render_vdt_text(&build_vdt(a, ColorPalette::css3(), OverrideTable::bundled())?))
            }
            Some(ChartInput::Table(t)) => {
                Some(render_vdt_text(&VisualDataTable::new(Orientation::Horizontal, t.clone(), Default::default())?))
            }
            None => None,
        };
        if let Some(t) = table {
            spec = spec.with_table(t);
        }
    }
    Ok(assemble_prompt(&spec)?)
}

fn failed_record(cfg: &RunConfig, sample: &Sample, prompt_hash: String, error: String) -> EvalRecord {
    EvalRecord {
        sample_id: sample.id.clone(),
        split: sample.split.map(|s| s.as_str().to_string()),
        prompt_hash,
        completion: None,
        extracted: None,
        gold: sample.gold.clone(),
        correct: (cfg.task == TaskKind::Fcqa).then_some(false),
        similarity: None,
        rnss: None,
        rms: None,
        error: Some(error),
        latency_ms: 0,
        from_cache: false,
        attempts: 0,
    }
}

/// Runs every selected sample not yet in the ledger, then writes the report
/// files from the ledger. Gateway failures are recorded per sample.
pub fn run_experiment(cfg: &RunConfig, client: &LlmClient) -> Result<MetricReport, HarnessError> {
    cfg.validate()?;
    let samples = select_samples(cfg, load_dataset(cfg.task, &cfg.dataset)?);
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| HarnessError::io(&cfg.out_dir, e))?;
    let mut ledger = Ledger::open(&cfg.out_dir.join(LEDGER_FILE))?;

    let pending: Vec<&Sample> = {
        let done = ledger.completed_ids();
        samples.iter().filter(|s| !done.contains(s.id.as_str())).collect()
    };
    log::info!("{} of {} samples pending", pending.len(), samples.len());

    for batch in pending.chunks(cfg.effective_batch_size()) {
        let prepared: Vec<Result<CompletionRequest, HarnessError>> = batch
            .iter()
            .map(|s| Ok(CompletionRequest::new(&cfg.model_id, prepare_prompt(cfg, s)?, cfg.params)?))
            .collect();
        let requests: Vec<CompletionRequest> = prepared.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
        let mut responses = client.complete_all(&requests, cfg.parallelism).into_iter();
        for (sample, req) in batch.iter().zip(prepared) {
            let record = match req {
                Err(e) => failed_record(cfg, sample, String::new(), e.to_string()),
                Ok(req) => match responses.next().expect("one response per request") {
                    Err(e) => failed_record(cfg, sample, req.cache_key().to_string(), e.to_string()),
                    Ok(resp) => {
                        let mut rec = failed_record(cfg, sample, req.cache_key().to_string(), String::new());
                        rec.error = None;
                        if cfg.task == TaskKind::Fcqa {
                            let extracted = extract_final_answer(&resp.text);
                            rec.correct = Some(relaxed_match(&extracted, &sample.gold, cfg.tolerance));
                            rec.extracted = Some(extracted);
                        } else {
                            rec.similarity = Some(text_similarity(&resp.text, &sample.gold));
                        }
                        rec.completion = Some(resp.text);
                        rec.latency_ms = resp.latency_ms;
                        rec.from_cache = resp.from_cache;
                        rec.attempts = resp.attempts;
                        rec
                    }
                },
            };
            ledger.append(record)?;
        }
    }

    // aggregate over the selection, in selection order
    let by_id: HashMap<&str, &EvalRecord> = ledger.records().iter().map(|r| (r.sample_id.as_str(), r)).collect();
    let records: Vec<EvalRecord> =
        samples.iter().filter_map(|s| by_id.get(s.id.as_str()).map(|r| (*r).clone())).collect();
    let report = MetricReport::from_records(records);
    write_report(cfg.task, &report, ReportFormat::Table, &cfg.out_dir.join(REPORT_TABLE_FILE))?;
    write_report(cfg.task, &report, ReportFormat::Records, &cfg.out_dir.join(REPORT_RECORDS_FILE))?;
    Ok(report)
}
