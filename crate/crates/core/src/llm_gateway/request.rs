use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GatewayError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
}

impl Default for DecodingParams {
    fn default() -> Self {
        DecodingParams { temperature: 0.7, top_p: 0.9, max_tokens: 256, frequency_penalty: 0.0, presence_penalty: 0.0 }
    }
}

impl DecodingParams {
    pub fn validate(&self) -> Result<(), GatewayError> {
        let bad = |m: &str| Err(GatewayError::Config(m.to_string()));
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad("temperature must be a finite number >= 0");
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad("top_p must be in (0, 1]");
        }
        if self.max_tokens == 0 {
            return bad("max_tokens must be positive");
        }
        if !(self.frequency_penalty.is_finite() && self.presence_penalty.is_finite()) {
            return bad("penalties must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionRequest {
    model_id: String,
    prompt: String,
    params: DecodingParams,
    cache_key: String,
}

impl CompletionRequest {
    pub fn new(
        model_id: impl Into<String>,
        prompt: impl Into<String>,
        params: DecodingParams,
    ) -> Result<Self, GatewayError> {
        let model_id = model_id.into();
        if model_id.trim().is_empty() {
            return Err(GatewayError::Config("model id is required".into()));
        }
        params.validate()?;
        let prompt = prompt.into();
        let cache_key = cache_key(&model_id, &prompt, &params);
        Ok(CompletionRequest { model_id, prompt, params, cache_key })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn prompt(&self) -> &str {
        &self.prompt
    }

    pub fn params(&self) -> &DecodingParams {
        &self.params
    }

    pub fn cache_key(&self) -> &str {
        &self.cache_key
    }
}

/// SHA-256 over length-prefixed model id and prompt followed by the exact
/// bit patterns of the decoding parameters.
pub fn cache_key(model_id: &str, prompt: &str, params: &DecodingParams) -> String {
    let mut h = Sha256::new();
    for field in [model_id.as_bytes(), prompt.as_bytes()] {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    h.update(params.temperature.to_bits().to_le_bytes());
    h.update(params.top_p.to_bits().to_le_bytes());
    h.update(params.max_tokens.to_le_bytes());
    h.update(params.frequency_penalty.to_bits().to_le_bytes());
    h.update(params.presence_penalty.to_bits().to_le_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u32,
    pub completion_tokens: u32,
    pub total_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
    pub usage: Usage,
    pub latency_ms: u64,
    pub from_cache: bool,
    /// Backend calls made for this response; 0 for cache hits.
    pub attempts: u32,
}
