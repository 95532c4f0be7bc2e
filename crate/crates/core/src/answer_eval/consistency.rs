use serde::{Deserialize, Serialize};

use super::metrics::normalized_levenshtein;
use crate::llm_gateway::{CompletionRequest, DecodingParams, LlmClient};
use crate::prompt_kit::{assemble_prompt, builtin_demonstrations, PromptSpec, TaskKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub task: TaskKind,
    pub demo_index: usize,
    /// `None` when the completion call failed.
    pub similarity: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `1 - normalized_levenshtein` after collapsing whitespace.
pub fn text_similarity(generated: &str, reference: &str) -> f64 {
    1.0 - normalized_levenshtein(&squash(generated), &squash(reference))
}

/// Asks the model each builtin demonstration's own input under the
/// few-shot prompt and compares the answer with the demonstration's output.
pub fn consistency_check(
    task: TaskKind,
    client: &LlmClient,
    model_id: &str,
    params: DecodingParams,
    threshold: f64,
    parallelism: usize,
) -> Vec<ConsistencyResult> {
    let demos = builtin_demonstrations(task);
    let requests: Vec<_> = demos
        .iter()
        .map(|d| {
            let prompt =
                assemble_prompt(&PromptSpec::few_shot(task, d.input_block.clone())).map_err(|e| e.to_string())?;
            CompletionRequest::new(model_id, prompt, params).map_err(|e| e.to_string())
        })
        .collect();
    let ready: Vec<CompletionRequest> = requests.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    let mut responses = client.complete_all(&ready, parallelism).into_iter();

    demos
        .iter()
        .zip(requests)
        .map(|(d, req)| {
            let outcome =
                req.and_then(|_| responses.next().expect("one response per request").map_err(|e| e.to_string()));
            match outcome {
                Ok(resp) => {
                    let similarity = text_similarity(&resp.text, &d.gold_output);
                    ConsistencyResult {
                        task,
                        demo_index: d.index,
                        similarity: Some(similarity),
                        pass: similarity >= threshold,
                        error: None,
                    }
                }
                Err(e) => {
                    ConsistencyResult { task, demo_index: d.index, similarity: None, pass: false, error: Some(e) }
                }
            }
        })
        .collect()
}
