//! Offline backends for tests and dry runs.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::client::{BackendReply, CompletionBackend};
use super::request::{CompletionRequest, Usage};
use super::GatewayError;
use crate::prompt_kit::{block_labels, Demonstration};

/// Text returned for prompts a mock has no answer for.
pub const MOCK_SENTINEL: &str = "[no mock completion]";

const REPLAY_FORMAT_VERSION: u32 = 1;

fn reply(text: &str) -> BackendReply {
    BackendReply { text: text.to_string(), usage: Usage::default() }
}

/// Answers from a fixed prompt-to-completion table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayBackend {
    version: u32,
    entries: BTreeMap<String, String>,
}

impl ReplayBackend {
    pub fn new(entries: BTreeMap<String, String>) -> Self {
        ReplayBackend { version: REPLAY_FORMAT_VERSION, entries }
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), GatewayError> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).map_err(|e| GatewayError::Config(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GatewayError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        let table: ReplayBackend =
            serde_json::from_str(&text).map_err(|e| GatewayError::Config(format!("{}: {e}", path.display())))?;
        if table.version != REPLAY_FORMAT_VERSION {
            return Err(GatewayError::Config(format!("unsupported replay table version {}", table.version)));
        }
        Ok(table)
    }
}

impl CompletionBackend for ReplayBackend {
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        Ok(reply(self.entries.get(req.prompt()).map_or(MOCK_SENTINEL, String::as_str)))
    }

    fn measures_latency(&self) -> bool {
        false
    }
}

/// Answers a prompt whose target block is a demonstration's input with that
/// demonstration's gold output.
#[derive(Debug, Clone)]
pub struct EchoDemonstrations {
    demos: Vec<Demonstration>,
}

impl EchoDemonstrations {
    pub fn new(demos: Vec<Demonstration>) -> Self {
        EchoDemonstrations { demos }
    }

    pub fn answer(&self, prompt: &str) -> Option<&str> {
        self.demos.iter().find_map(|d| {
            let (input, output) = block_labels(d.task);
            let target = format!("{input} {}\n{output}", d.input_block);
            prompt.trim_end().ends_with(&target).then_some(d.gold_output.as_str())
        })
    }
}

impl CompletionBackend for EchoDemonstrations {
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        Ok(reply(self.answer(req.prompt()).unwrap_or(MOCK_SENTINEL)))
    }

    fn measures_latency(&self) -> bool {
        false
    }
}

/// Plays back a script of outcomes, one per call; the last entry repeats.
pub struct ScriptedBackend {
    script: Mutex<VecDeque<Result<String, GatewayError>>>,
    calls: AtomicUsize,
}

impl ScriptedBackend {
    pub fn new(script: Vec<Result<String, GatewayError>>) -> Self {
        assert!(!script.is_empty(), "script needs at least one outcome");
        ScriptedBackend { script: Mutex::new(script.into()), calls: AtomicUsize::new(0) }
    }

    /// `failures` transient errors, then `text`.
    pub fn fail_then_succeed(failures: usize, text: &str) -> Self {
        let mut script: Vec<_> =
            (0..failures).map(|_| Err(GatewayError::Status { code: 503, body: "unavailable".into() })).collect();
        script.push(Ok(text.to_string()));
        Self::new(script)
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl CompletionBackend for ScriptedBackend {
    fn call(&self, _req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let mut script = self.script.lock().expect("script lock");
        let outcome = if script.len() > 1 { script.pop_front().expect("non-empty") } else { script[0].clone() };
        outcome.map(|t| reply(&t))
    }

    fn measures_latency(&self) -> bool {
        false
    }
}

/// Counts calls to an inner backend.
pub struct CountingBackend<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B> CountingBackend<B> {
    pub fn new(inner: B) -> Self {
        CountingBackend { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<B: CompletionBackend> CompletionBackend for CountingBackend<B> {
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.call(req)
    }

    fn measures_latency(&self) -> bool {
        self.inner.measures_latency()
    }
}

pub enum MockMode {
    Replay(BTreeMap<String, String>),
    EchoDemonstrations(Vec<Demonstration>),
}

pub fn mock_llm(mode: MockMode) -> Arc<dyn CompletionBackend> {
    match mode {
        MockMode::Replay(table) => Arc::new(ReplayBackend::new(table)),
        MockMode::EchoDemonstrations(demos) => Arc::new(EchoDemonstrations::new(demos)),
    }
}

/// Echo backend over every builtin demonstration.
pub fn all_demos_echo() -> EchoDemonstrations {
    EchoDemonstrations::new(crate::prompt_kit::all_builtin_demonstrations().to_vec())
}
