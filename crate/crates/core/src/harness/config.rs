use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::llm_gateway::{
    all_demos_echo, CompletionBackend, DecodingParams, EndpointConfig, HttpBackend, LlmClient, ReplayBackend,
    ResponseCache, RetryPolicy,
};
use crate::prompt_kit::{PromptMode, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Augmented,
    Human,
    All,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Augmented => "augmented",
            Split::Human => "human",
            Split::All => "all",
        }
    }

    pub fn admits(self, sample: Option<Split>) -> bool {
        self == Split::All || sample == Some(self)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "augmented" | "aug" => Ok(Split::Augmented),
            "human" => Ok(Split::Human),
            "all" => Ok(Split::All),
            other => Err(HarnessError::Config(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendSpec {
    /// Answers each demonstration's own input with its gold output.
    Echo,
    /// Prompt-to-completion table loaded from a JSON file.
    Replay {
        table: PathBuf,
    },
    Http(EndpointConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: TaskKind,
    pub mode: PromptMode,
    #[serde(default)]
    pub shots: Option<usize>,
    pub dataset: PathBuf,
    /// Factoid QA only.
    #[serde(default)]
    pub split: Option<Split>,
    pub model_id: String,
    pub backend: BackendSpec,
    #[serde(default)]
    pub params: DecodingParams,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub limit: Option<usize>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Samples sent together before their records are written. Defaults to
    /// `parallelism`, so a crash loses only the samples in flight.
    #[serde(default)]
    pub batch_size: Option<usize>,
}

fn default_tolerance() -> f64 {
    crate::answer_eval::DEFAULT_TOLERANCE
}

fn default_parallelism() -> usize {
    1
}

impl RunConfig {
    pub fn new(task: TaskKind, dataset: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            task,
            mode: PromptMode::FewShot,
            shots: None,
            dataset: dataset.into(),
            split: None,
            model_id: "mock".into(),
            backend: BackendSpec::Echo,
            params: DecodingParams::default(),
            retry: RetryPolicy::default(),
            cache: None,
            out_dir: out_dir.into(),
            seed: 0,
            limit: None,
            tolerance: default_tolerance(),
            parallelism: default_parallelism(),
            batch_size: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.split.is_some() && self.task != TaskKind::Fcqa {
            return bad(format!("split applies to fcqa only, not {}", self.task));
        }
        if self.model_id.trim().is_empty() {
            return bad("model id is required".into());
        }
        if self.shots.is_some() && self.mode == PromptMode::ZeroShot {
            return bad("shots only apply to few-shot runs".into());
        }
        if self.shots == Some(0) {
            return bad("shots must be positive".into());
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be a finite number >= 0".into());
        }
        if self.parallelism == 0 || self.batch_size == Some(0) {
            return bad("parallelism and batch size must be positive".into());
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn effective_batch_size(&self) -> usize {
        self.batch_size.unwrap_or(self.parallelism)
    }

    pub fn effective_split(&self) -> Split {
        self.split.unwrap_or(Split::All)
    }
}

pub fn build_backend(spec: &BackendSpec) -> Result<Arc<dyn CompletionBackend>, HarnessError> {
    Ok(match spec {
        BackendSpec::Echo => Arc::new(all_demos_echo()),
        BackendSpec::Replay { table } => Arc::new(ReplayBackend::load(table)?),
        BackendSpec::Http(cfg) => Arc::new(HttpBackend::from_config(cfg)?),
    })
}

/// Client with the configured backend, retry policy and optional cache.
pub fn build_client(cfg: &RunConfig) -> Result<LlmClient, HarnessError> {
    let mut client = LlmClient::new(build_backend(&cfg.backend)?).with_retry(cfg.retry);
    if let Some(path) = &cfg.cache {
        client = client.with_cache(Arc::new(ResponseCache::open(path)?));
    }
    Ok(client.with_max_in_flight(cfg.parallelism))
}
