use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::client::{BackendReply, CompletionBackend};
use super::request::{CompletionRequest, Usage};
use super::GatewayError;

pub const API_KEY_ENV: &str = "CHARTQA_API_KEY";

/// Client settings. `model_id` has no default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Full URL of the completions endpoint.
    pub endpoint: String,
    pub model_id: String,
    pub api_key_env: String,
    pub timeout_secs: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            endpoint: "https://api.openai.com/v1/completions".into(),
            model_id: String::new(),
            api_key_env: API_KEY_ENV.into(),
            timeout_secs: 60,
        }
    }
}

/// OpenAI-compatible `/v1/completions` backend.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
}

impl HttpBackend {
    pub fn new(
        endpoint: impl Into<String>,
        api_key: impl Into<String>,
        timeout: Duration,
    ) -> Result<Self, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(HttpBackend { client, endpoint: endpoint.into(), api_key: api_key.into() })
    }

    /// Reads the credential from the configured environment variable.
    pub fn from_config(cfg: &EndpointConfig) -> Result<Self, GatewayError> {
        let key = std::env::var(&cfg.api_key_env)
            .map_err(|_| GatewayError::Config(format!("environment variable {} is not set", cfg.api_key_env)))?;
        Self::new(&cfg.endpoint, key, Duration::from_secs(cfg.timeout_secs))
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct WireChoice {
    text: String,
}

impl CompletionBackend for HttpBackend {
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        let p = req.params();
        let body = json!({
            "model": req.model_id(),
            "prompt": req.prompt(),
            "temperature": p.temperature,
            "top_p": p.top_p,
            "max_tokens": p.max_tokens,
            "frequency_penalty": p.frequency_penalty,
            "presence_penalty": p.presence_penalty,
        });
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.text().map_err(|e| GatewayError::Transport(e.to_string()))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(GatewayError::Auth(format!("HTTP {status}: {text}"))),
            code => return Err(GatewayError::Status { code, body: text }),
        }
        let wire: WireResponse =
            serde_json::from_str(&text).map_err(|e| GatewayError::MalformedResponse(e.to_string()))?;
        let choice = wire
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| GatewayError::MalformedResponse("response has no choices".into()))?;
        Ok(BackendReply { text: choice.text, usage: wire.usage.unwrap_or_default() })
    }
}
