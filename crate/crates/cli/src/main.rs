use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chartqa_core::answer_eval::{consistency_check, MetricReport};
use chartqa_core::chart_data::render_vdt_text;
use chartqa_core::harness::{
    build_backend, build_client, emit_report, generate_synthetic_charts, load_dataset, prepare_prompt, run_experiment,
    select_samples, BackendSpec, Ledger, ReportFormat, RunConfig, Split, LEDGER_FILE,
};
use chartqa_core::llm_gateway::{EndpointConfig, LlmClient};
use chartqa_core::prompt_kit::{PromptMode, TaskKind};
use chartqa_core::vdt_builder::{build_vdt, parse_svg_chart, ColorPalette, OverrideTable};

#[derive(Parser)]
#[command(name = "chartqa", version, about = "Prompted chart QA and summarization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write ledger.jsonl, report.txt and report.jsonl.
    Run(RunArgs),
    /// Print the assembled prompts for a dataset or a single input.
    PromptDump(PromptDumpArgs),
    /// Write synthetic SVG charts with ground-truth tables.
    GenCharts(GenChartsArgs),
    /// Print the visual data table of SVG charts.
    VdtBuild(VdtBuildArgs),
    /// Rebuild the report of an existing run directory from its ledger.
    Score(ScoreArgs),
    /// Check that the model reproduces each demonstration's own answer.
    Consistency(ConsistencyArgs),
}

#[derive(Args)]
struct BackendArgs {
    /// `echo`, or a path to a replay table. Omit to call the HTTP endpoint.
    #[arg(long)]
    mock: Option<String>,
    /// Model id sent to the endpoint; required unless a mock answers.
    #[arg(long)]
    model: Option<String>,
    /// Completions endpoint URL; the key is read from CHARTQA_API_KEY.
    #[arg(long)]
    endpoint: Option<String>,
    /// Response cache file (JSON lines).
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl BackendArgs {
    fn model_id(&self) -> Option<String> {
        self.model.clone().or_else(|| self.mock.as_ref().map(|_| "mock".to_string()))
    }

    fn spec(&self) -> BackendSpec {
        match self.mock.as_deref() {
            Some("echo") => BackendSpec::Echo,
            Some(path) => BackendSpec::Replay { table: PathBuf::from(path) },
            None => {
                let mut cfg =
                    EndpointConfig { model_id: self.model.clone().unwrap_or_default(), ..EndpointConfig::default() };
                if let Some(url) = &self.endpoint {
                    cfg.endpoint = url.clone();
                }
                BackendSpec::Http(cfg)
            }
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    task: Option<TaskKind>,
    #[arg(long, value_parser = parse_mode, default_value = "few-shot")]
    mode: PromptMode,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    split: Option<Split>,
    #[command(flatten)]
    backend: BackendArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML run configuration; its keys take precedence over flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PromptDumpArgs {
    #[arg(long)]
    task: TaskKind,
    #[arg(long, value_parser = parse_mode, default_value = "few-shot")]
    mode: PromptMode,
    #[arg(long)]
    shots: Option<usize>,
    /// Dump one prompt per dataset sample.
    #[arg(long, conflicts_with = "input")]
    dataset: Option<PathBuf>,
    #[arg(long)]
    split: Option<Split>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    limit: Option<usize>,
    /// A single question or summarization input.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Args)]
struct GenChartsArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VdtBuildArgs {
    #[arg(required = true)]
    svg: Vec<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    task: TaskKind,
    /// Run directory holding ledger.jsonl.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "table")]
    format: String,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[arg(long)]
    task: Option<TaskKind>,
    #[command(flatten)]
    backend: BackendArgs,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
}

fn parse_mode(s: &str) -> Result<PromptMode, String> {
    match s {
        "zero-shot" | "zero" => Ok(PromptMode::ZeroShot),
        "few-shot" | "few" => Ok(PromptMode::FewShot),
        other => Err(format!("mode must be zero-shot or few-shot, got {other:?}")),
    }
}

/// Flags first, then every key of the config file on top.
fn resolve_run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut base = toml::Table::new();
    let mut set = |k: &str, v: toml::Value| {
        base.insert(k.to_string(), v);
    };
    if let Some(t) = args.task {
        set("task", t.as_str().into());
    }
    set("mode", toml::Value::try_from(args.mode)?);
    if let Some(n) = args.shots {
        set("shots", (n as i64).into());
    }
    if let Some(d) = &args.dataset {
        set("dataset", d.display().to_string().into());
    }
    if let Some(s) = args.split {
        set("split", s.as_str().into());
    }
    if let Some(m) = args.backend.model_id() {
        set("model_id", m.into());
    }
    set("backend", toml::Value::try_from(args.backend.spec())?);
    if let Some(c) = &args.backend.cache {
        set("cache", c.display().to_string().into());
    }
    if let Some(o) = &args.out {
        set("out_dir", o.display().to_string().into());
    }
    set("seed", (args.seed as i64).into());
    if let Some(l) = args.limit {
        set("limit", (l as i64).into());
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: toml::Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
        base.extend(file);
    }
    for (key, flag) in [("task", "task"), ("dataset", "dataset"), ("out_dir", "out"), ("model_id", "model")] {
        if !base.contains_key(key) {
            bail!("missing `{key}`: pass --{flag} or set it in the config file");
        }
    }
    Ok(RunConfig::from_toml(&toml::to_string(&base)?)?)
}

fn client_for(args: &BackendArgs) -> Result<LlmClient> {
    let mut client = LlmClient::new(build_backend(&args.spec())?);
    if let Some(path) = &args.cache {
        let cache = chartqa_core::llm_gateway::ResponseCache::open(path)?;
        client = client.with_cache(std::sync::Arc::new(cache));
    }
    Ok(client)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = resolve_run_config(&args)?;
    let client = build_client(&cfg)?;
    let report = run_experiment(&cfg, &client)?;
    print!("{}", emit_report(cfg.task, &report, ReportFormat::Table));
    Ok(())
}

fn prompt_dump(args: PromptDumpArgs) -> Result<()> {
    let mut cfg = RunConfig::new(args.task, args.dataset.clone().unwrap_or_default(), PathBuf::new());
    cfg.mode = args.mode;
    cfg.shots = args.shots;
    cfg.split = args.split;
    cfg.seed = args.seed;
    cfg.limit = args.limit;
    cfg.validate()?;
    let samples = match (&args.dataset, &args.input) {
        (Some(root), _) => select_samples(&cfg, load_dataset(args.task, root)?),
        (None, Some(input)) => vec![chartqa_core::harness::Sample {
            id: "input".into(),
            split: None,
            input: input.clone(),
            gold: String::new(),
            chart: None,
        }],
        (None, None) => bail!("pass --dataset or --input"),
    };
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            println!("\n=====");
        }
        print!("{}", prepare_prompt(&cfg, s)?);
        println!();
    }
    Ok(())
}

fn gen_charts(args: GenChartsArgs) -> Result<()> {
    let manifest = generate_synthetic_charts(args.n, args.seed, &args.out)?;
    println!("wrote {} charts to {}", manifest.charts.len(), args.out.display());
    Ok(())
}

fn vdt_build(args: VdtBuildArgs) -> Result<()> {
    for path in &args.svg {
        let svg = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let annotation = parse_svg_chart(&svg).with_context(|| path.display().to_string())?;
        let vdt = build_vdt(&annotation, ColorPalette::css3(), OverrideTable::bundled())?;
        println!("{}", render_vdt_text(&vdt));
    }
    Ok(())
}

fn score(args: ScoreArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let path: &Path = &args.out.join(LEDGER_FILE);
    if !path.exists() {
        bail!("no ledger at {}", path.display());
    }
    let ledger = Ledger::open(path)?;
    let report = MetricReport::from_records(ledger.records().to_vec());
    print!("{}", emit_report(args.task, &report, format));
    Ok(())
}

fn consistency(args: ConsistencyArgs) -> Result<()> {
    let Some(model) = args.backend.model_id() else { bail!("pass --model or --mock") };
    let client = client_for(&args.backend)?;
    let tasks: Vec<TaskKind> = args.task.map_or_else(|| TaskKind::ALL.to_vec(), |t| vec![t]);
    let mut failed = 0;
    for task in tasks {
        for r in consistency_check(task, &client, &model, Default::default(), args.threshold, 1) {
            let sim = r.similarity.map_or_else(|| "-".to_string(), |s| format!("{s:.4}"));
            let status = if r.pass { "ok" } else { "FAIL" };
            println!(
                "{}\t{}\t{sim}\t{status}{}",
                r.task,
                r.demo_index,
                r.error.map(|e| format!("\t{e}")).unwrap_or_default()
            );
            failed += usize::from(!r.pass);
        }
    }
    if failed > 0 {
        bail!("{failed} demonstrations below threshold {}", args.threshold);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::PromptDump(a) => prompt_dump(a),
        Command::GenCharts(a) => gen_charts(a),
        Command::VdtBuild(a) => vdt_build(a),
        Command::Score(a) => score(a),
        Command::Consistency(a) => consistency(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
