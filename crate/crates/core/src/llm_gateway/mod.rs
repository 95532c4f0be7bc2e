//! Completion endpoint client with retries, a response cache and offline
//! mocks.

mod cache;
mod client;
mod http;
mod limit;
mod mock;
mod request;

pub use cache::{CachedResponse, ResponseCache};
pub use client::{BackendReply, CompletionBackend, LlmClient, RetryPolicy};
pub use http::{EndpointConfig, HttpBackend, API_KEY_ENV};
pub use limit::{InFlightLimiter, InFlightPermit, TokenBucket};
pub use mock::{
    all_demos_echo, mock_llm, CountingBackend, EchoDemonstrations, MockMode, ReplayBackend, ScriptedBackend,
    MOCK_SENTINEL,
};
pub use request::{cache_key, CompletionRequest, CompletionResponse, DecodingParams, Usage};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("HTTP {code}: {body}")]
    Status { code: u16, body: String },
    #[error("transport: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("cache: {0}")]
    Cache(String),
}

impl GatewayError {
    /// Worth retrying: 429, 5xx and transport failures.
    pub fn is_transient(&self) -> bool {
        match self {
            GatewayError::Status { code, .. } => *code == 429 || (500..600).contains(code),
            GatewayError::Transport(_) => true,
            _ => false,
        }
    }
}
