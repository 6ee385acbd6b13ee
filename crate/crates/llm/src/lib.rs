//! Chat-completions client for running parsing prompts against a served
//! model: retries with exponential backoff, a bounded number of requests in
//! flight, and results returned in input order.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use futures::stream::{self, Stream, StreamExt};
use rasp_core::prompting::{PromptRecord, Role};
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

/// Environment variable holding the endpoint's API key.
pub const API_KEY_ENV: &str = "RASP_API_KEY";

/// Upper bound on `retries`.
pub const MAX_RETRIES: u32 = 10;

const MAX_BACKOFF: Duration = Duration::from_secs(30);

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    #[serde(skip_serializing)]
    pub api_key: Option<String>,
    pub max_in_flight: usize,
    /// Per-request timeout in seconds.
    pub timeout: f64,
    /// Extra attempts after the first one.
    pub retries: u32,
    /// First backoff delay in milliseconds, doubled on every retry.
    pub backoff_ms: u64,
    pub temperature: f64,
    /// Ask for token log-probabilities (dropped if the endpoint rejects them).
    pub logprobs: bool,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "http://localhost:8000/v1".into(),
            model: String::new(),
            api_key: None,
            max_in_flight: 4,
            timeout: 120.0,
            retries: 3,
            backoff_ms: 500,
            temperature: 0.0,
            logprobs: true,
        }
    }
}

impl std::fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("max_in_flight", &self.max_in_flight)
            .field("timeout", &self.timeout)
            .field("retries", &self.retries)
            .field("backoff_ms", &self.backoff_ms)
            .field("temperature", &self.temperature)
            .field("logprobs", &self.logprobs)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid base URL `{0}`")]
    BaseUrl(String),
    #[error("max_in_flight must be at least 1")]
    MaxInFlight,
    #[error("retries must be at most {MAX_RETRIES}, got {0}")]
    Retries(u32),
    #[error("temperature must be a finite value >= 0, got {0}")]
    Temperature(f64),
    #[error("timeout must be a positive number of seconds, got {0}")]
    Timeout(f64),
    #[error("no model name configured")]
    Model,
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let url = reqwest::Url::parse(&self.base_url).map_err(|_| ConfigError::BaseUrl(self.base_url.clone()))?;
        if !matches!(url.scheme(), "http" | "https") {
            return Err(ConfigError::BaseUrl(self.base_url.clone()));
        }
        if self.model.is_empty() {
            return Err(ConfigError::Model);
        }
        if self.max_in_flight == 0 {
            return Err(ConfigError::MaxInFlight);
        }
        if self.retries > MAX_RETRIES {
            return Err(ConfigError::Retries(self.retries));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(ConfigError::Temperature(self.temperature));
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(ConfigError::Timeout(self.timeout));
        }
        Ok(())
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let factor = 2u64.saturating_pow(attempt.saturating_sub(1));
        Duration::from_millis(self.backoff_ms.saturating_mul(factor)).min(MAX_BACKOFF)
    }
}

/// A model answer; `output` may well be ill-formed SBN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub output: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_logprobs: Option<Vec<f64>>,
    /// Seconds from first request to answer, retries included.
    #[serde(default)]
    pub latency: f64,
    #[serde(default = "one")]
    pub attempt_count: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlmError {
    #[error("{id}: endpoint unreachable after {attempts} attempts: {reason}")]
    EndpointUnreachable { id: String, attempts: u32, reason: String },
    #[error("{id}: endpoint refused the credentials (HTTP {status})")]
    AuthFailed { id: String, status: u16 },
    #[error("{id}: gave up after {attempts} attempts, last error: {last}")]
    ExhaustedRetries { id: String, attempts: u32, last: String },
    #[error("{id}: endpoint rejected the request (HTTP {status}): {body}")]
    Rejected { id: String, status: u16, body: String },
    #[error("{id}: record has no user message")]
    NoUserMessage { id: String },
}

impl LlmError {
    pub fn id(&self) -> &str {
        match self {
            LlmError::EndpointUnreachable { id, .. }
            | LlmError::AuthFailed { id, .. }
            | LlmError::ExhaustedRetries { id, .. }
            | LlmError::Rejected { id, .. }
            | LlmError::NoUserMessage { id } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogprobError {
    #[error("log-probability {value} at position {index} is not <= 0")]
    PositiveLogprob { index: usize, value: f64 },
}

/// Log-probability of a whole sequence: the sum of its token
/// log-probabilities, i.e. the log of the product of the token
/// probabilities. An empty sequence has log-probability 0.
pub fn sequence_logprob(token_logprobs: &[f64]) -> Result<f64, LogprobError> {
    let mut sum = 0.0;
    for (index, &value) in token_logprobs.iter().enumerate() {
        // NaN fails the comparison too.
        if value.is_nan() || value > 0.0 {
            return Err(LogprobError::PositiveLogprob { index, value });
        }
        sum += value;
    }
    Ok(sum)
}

/// One failed attempt and whether another may succeed.
enum Attempt {
    Retry { connect: bool, reason: String },
    Fatal(LlmError),
}

pub struct Client {
    http: reqwest::Client,
    config: EndpointConfig,
    logprobs: AtomicBool,
}

impl Client {
    pub fn new(config: EndpointConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout))
            .build()
            .map_err(|_| ConfigError::BaseUrl(config.base_url.clone()))?;
        let logprobs = AtomicBool::new(config.logprobs);
        Ok(Client { http, config, logprobs })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn body(&self, record: &PromptRecord) -> Result<Value, LlmError> {
        // Everything up to the last user turn; a trailing gold answer is not sent.
        let last_user = record
            .messages
            .iter()
            .rposition(|m| m.role == Role::User)
            .ok_or_else(|| LlmError::NoUserMessage { id: record.id.clone() })?;
        let messages: Vec<Value> = record.messages[..=last_user]
            .iter()
            .map(|m| {
                let role = match m.role {
                    Role::User => "user",
                    Role::Model => "assistant",
                };
                json!({ "role": role, "content": m.content })
            })
            .collect();
        let mut body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        });
        if self.logprobs.load(Ordering::Relaxed) {
            body["logprobs"] = json!(true);
        }
        Ok(body)
    }

    /// One completion for `record`, retried on transport errors, timeouts,
    /// HTTP 408, 429 and 5xx.
    pub async fn infer(&self, record: &PromptRecord) -> Result<Prediction, LlmError> {
        let id = record.id.clone();
        let started = Instant::now();
        let mut attempts = 0;
        loop {
            attempts += 1;
            let failure = match self.attempt(record).await? {
                Ok((output, token_logprobs)) => {
                    let latency = started.elapsed().as_secs_f64();
                    return Ok(Prediction { id, output, token_logprobs, latency, attempt_count: attempts });
                }
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry { connect, reason }) => (connect, reason),
            };
            if attempts > self.config.retries {
                let (connect, reason) = failure;
                return Err(if connect {
                    LlmError::EndpointUnreachable { id, attempts, reason }
                } else {
                    LlmError::ExhaustedRetries { id, attempts, last: reason }
                });
            }
            tokio::time::sleep(self.config.backoff(attempts)).await;
        }
    }

    #[allow(clippy::type_complexity)]
    async fn attempt(&self, record: &PromptRecord) -> Result<Result<(String, Option<Vec<f64>>), Attempt>, LlmError> {
        let id = &record.id;
        loop {
            let body = self.body(record)?;
            let mut request = self.http.post(self.config.endpoint()).json(&body);
            if let Some(key) = &self.config.api_key {
                request = request.bearer_auth(key);
            }
            let response = match request.send().await {
                Ok(r) => r,
                Err(e) => return Ok(Err(Attempt::Retry { connect: e.is_connect(), reason: e.to_string() })),
            };
            let status = response.status();
            if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
                return Ok(Err(Attempt::Fatal(LlmError::AuthFailed { id: id.clone(), status: status.as_u16() })));
            }
            if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS || status == StatusCode::REQUEST_TIMEOUT {
                return Ok(Err(Attempt::Retry { connect: false, reason: format!("HTTP {status}") }));
            }
            let text = match response.text().await {
                Ok(t) => t,
                Err(e) => return Ok(Err(Attempt::Retry { connect: false, reason: e.to_string() })),
            };
            if status.is_success() {
                return Ok(parse_completion(&text).map_err(|reason| Attempt::Retry { connect: false, reason }));
            }
            if body.get("logprobs").is_some() && (status == StatusCode::BAD_REQUEST || status == StatusCode::UNPROCESSABLE_ENTITY) {
                // Probably no log-probability support: ask again without.
                self.logprobs.store(false, Ordering::Relaxed);
                continue;
            }
            return Ok(Err(Attempt::Fatal(LlmError::Rejected { id: id.clone(), status: status.as_u16(), body: text })));
        }
    }

    /// Completions in input order with at most `max_in_flight` requests
    /// outstanding. Failures are yielded in place.
    pub fn infer_stream<'a>(&'a self, records: &'a [PromptRecord]) -> impl Stream<Item = Result<Prediction, LlmError>> + 'a {
        stream::iter(records).map(move |r| self.infer(r)).buffered(self.config.max_in_flight)
    }

    pub async fn infer_batch(&self, records: &[PromptRecord]) -> Vec<Result<Prediction, LlmError>> {
        self.infer_stream(records).collect().await
    }
}

/// Text and optional token log-probabilities of the first choice.
fn parse_completion(text: &str) -> Result<(String, Option<Vec<f64>>), String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("malformed response: {e}"))?;
    let choice = value.get("choices").and_then(|c| c.get(0)).ok_or("response has no choices")?;
    let content = choice.pointer("/message/content").and_then(Value::as_str).ok_or("choice has no message content")?;
    let logprobs = choice
        .pointer("/logprobs/content")
        .and_then(Value::as_array)
        .map(|tokens| tokens.iter().filter_map(|t| t.get("logprob").and_then(Value::as_f64)).collect());
    Ok((content.to_string(), logprobs))
}
