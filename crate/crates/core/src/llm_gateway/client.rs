use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::cache::{CachedResponse, ResponseCache};
use super::limit::{InFlightLimiter, TokenBucket};
use super::request::{CompletionRequest, CompletionResponse, Usage};
use super::GatewayError;

/// What a backend returns for one successful call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendReply {
    pub text: String,
    pub usage: Usage,
}

pub trait CompletionBackend: Send + Sync {
    /// One attempt, no retries.
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError>;

    /// Whether wall-clock latency is meaningful. Mocks return false so that
    /// recorded runs stay byte-stable.
    fn measures_latency(&self) -> bool {
        true
    }
}

impl<B: CompletionBackend + ?Sized> CompletionBackend for Arc<B> {
    fn call(&self, req: &CompletionRequest) -> Result<BackendReply, GatewayError> {
        (**self).call(req)
    }

    fn measures_latency(&self) -> bool {
        (**self).measures_latency()
    }
}

/// Exponential backoff without jitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub multiplier: f64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 5, base_delay_ms: 500, multiplier: 2.0, max_delay_ms: 30_000 }
    }
}

impl RetryPolicy {
    pub fn no_delay(max_attempts: u32) -> Self {
        RetryPolicy { max_attempts, base_delay_ms: 0, multiplier: 1.0, max_delay_ms: 0 }
    }

    /// Delay after failed attempt `attempt` (1-based).
    pub fn delay_after(&self, attempt: u32) -> Duration {
        let factor = self.multiplier.max(1.0).powi(attempt.saturating_sub(1).min(64) as i32);
        let ms = (self.base_delay_ms as f64 * factor).min(self.max_delay_ms as f64);
        Duration::from_millis(ms as u64)
    }
}

type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

/// Completion client: cache lookup, rate limiting, and retries around a
/// backend.
pub struct LlmClient {
    backend: Arc<dyn CompletionBackend>,
    cache: Option<Arc<ResponseCache>>,
    retry: RetryPolicy,
    bucket: Option<TokenBucket>,
    in_flight: Option<InFlightLimiter>,
    sleep: Sleeper,
}

impl LlmClient {
    pub fn new(backend: Arc<dyn CompletionBackend>) -> Self {
        LlmClient {
            backend,
            cache: None,
            retry: RetryPolicy::default(),
            bucket: None,
            in_flight: None,
            sleep: Arc::new(std::thread::sleep),
        }
    }

    pub fn with_cache(mut self, cache: Arc<ResponseCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_rate_limit(mut self, per_second: f64, burst: u32) -> Self {
        self.bucket = Some(TokenBucket::new(per_second, burst));
        self
    }

    pub fn with_max_in_flight(mut self, n: usize) -> Self {
        self.in_flight = Some(InFlightLimiter::new(n));
        self
    }

    /// Replaces the function used to wait between retries.
    pub fn with_sleeper(mut self, sleep: impl Fn(Duration) + Send + Sync + 'static) -> Self {
        self.sleep = Arc::new(sleep);
        self
    }

    pub fn cache(&self) -> Option<&Arc<ResponseCache>> {
        self.cache.as_ref()
    }

    pub fn complete(&self, req: &CompletionRequest) -> Result<CompletionResponse, GatewayError> {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(req.cache_key())) {
            return Ok(CompletionResponse {
                text: hit.text,
                usage: hit.usage,
                latency_ms: 0,
                from_cache: true,
                attempts: 0,
            });
        }
        let started = Instant::now();
        let max_attempts = self.retry.max_attempts.max(1);
        let mut attempt = 0;
        let reply = loop {
            attempt += 1;
            if let Some(b) = &self.bucket {
                b.acquire();
            }
            let result = {
                let _permit = self.in_flight.as_ref().map(InFlightLimiter::acquire);
                self.backend.call(req)
            };
            match result {
                Ok(r) => break r,
                Err(e) if e.is_transient() && attempt < max_attempts => {
                    log::warn!("attempt {attempt}/{max_attempts} failed: {e}");
                    (self.sleep)(self.retry.delay_after(attempt));
                }
                Err(e) if e.is_transient() => {
                    return Err(match e {
                        GatewayError::Status { code: 429, .. } => GatewayError::RateLimited { attempts: attempt },
                        other => other,
                    })
                }
                Err(e) => return Err(e),
            }
        };
        let latency_ms = if self.backend.measures_latency() { started.elapsed().as_millis() as u64 } else { 0 };
        if let Some(c) = &self.cache {
            c.put(req.cache_key(), CachedResponse { text: reply.text.clone(), usage: reply.usage })?;
        }
        Ok(CompletionResponse {
            text: reply.text,
            usage: reply.usage,
            latency_ms,
            from_cache: false,
            attempts: attempt,
        })
    }

    /// Completes requests on up to `parallelism` threads; results keep the
    /// input order.
    pub fn complete_all(
        &self,
        reqs: &[CompletionRequest],
        parallelism: usize,
    ) -> Vec<Result<CompletionResponse, GatewayError>> {
        let mut out: Vec<Option<Result<CompletionResponse, GatewayError>>> = vec![None; reqs.len()];
        let chunk = reqs.len().div_ceil(parallelism.max(1)).max(1);
        std::thread::scope(|s| {
            for (slots, batch) in out.chunks_mut(chunk).zip(reqs.chunks(chunk)) {
                s.spawn(move || {
                    for (slot, req) in slots.iter_mut().zip(batch) {
                        *slot = Some(self.complete(req));
                    }
                });
            }
        });
        out.into_iter().map(|r| r.expect("every slot filled")).collect()
    }
}
