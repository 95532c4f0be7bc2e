#![allow(dead_code)]

pub mod oracle;
pub mod random;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chartqa_core::chart_data::DataTable;
use chartqa_core::harness::{
    generate_synthetic_charts, load_dataset, prepare_prompt, select_samples, BackendSpec, RunConfig,
};
use chartqa_core::llm_gateway::ReplayBackend;
use chartqa_core::prompt_kit::TaskKind;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Writes a factoid QA dataset over `n` synthetic charts: even charts go to
/// the augmented split, odd ones to the human split. Each question asks for
/// the first cell of its chart.
pub fn write_chart_dataset(root: &Path, n: usize, seed: u64) {
    let manifest = generate_synthetic_charts(n, seed, &root.join("svg")).unwrap();
    let mut aug = Vec::new();
    let mut human = Vec::new();
    for (i, c) in manifest.charts.iter().enumerate() {
        let table: DataTable =
            serde_json::from_str(&std::fs::read_to_string(root.join("svg").join(&c.table)).unwrap()).unwrap();
        let row = &table.rows()[0];
        let rec = serde_json::json!({
            "imgname": format!("{}.png", c.id),
            "query": format!("What is the {} value of {}?", table.column_headers()[0], row.label),
            "label": row.cells[0].raw(),
        });
        if i % 2 == 0 {
            aug.push(rec)
        } else {
            human.push(rec)
        }
    }
    std::fs::write(root.join("test_augmented.json"), serde_json::to_string_pretty(&aug).unwrap()).unwrap();
    std::fs::write(root.join("test_human.json"), serde_json::to_string_pretty(&human).unwrap()).unwrap();
}

/// Replay table answering every sample of `cfg`, correctly unless `wrong`
/// picks its position; wrong answers are off by 50%.
pub fn replay_for(cfg: &RunConfig, wrong: impl Fn(usize) -> bool) -> ReplayBackend {
    let samples = select_samples(cfg, load_dataset(cfg.task, &cfg.dataset).unwrap());
    let mut entries = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let answer = if wrong(i) {
            let g: f64 = s.gold.parse().unwrap();
            format!("{}", g * 1.5 + 1.0)
        } else {
            s.gold.clone()
        };
        entries.insert(
            prepare_prompt(cfg, s).unwrap(),
            format!("Reading the chart gives {answer}. The answer is {answer}."),
        );
    }
    ReplayBackend::new(entries)
}

pub fn fcqa_config(dataset: &Path, out: &Path, replay: &Path) -> RunConfig {
    let mut cfg = RunConfig::new(TaskKind::Fcqa, dataset, out);
    cfg.model_id = "mock".into();
    cfg.backend = BackendSpec::Replay { table: replay.to_path_buf() };
    cfg.batch_size = Some(4);
    cfg
}
