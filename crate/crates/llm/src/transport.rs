use std::collections::VecDeque;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

/// Environment variable holding the endpoint credential.
pub const API_KEY_ENV: &str = "CCR_LLM_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-4o-mini";
pub const DEFAULT_TEMPERATURE: f64 = 0.7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub system: String,
    pub user: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    /// Network trouble or a server-side failure.
    #[error("transport failure: {message}")]
    Transport { message: String, transient: bool },
    #[error("rate limited{}", retry_after.map(|d| format!(" (retry after {d:?})")).unwrap_or_default())]
    RateLimited { retry_after: Option<Duration> },
    #[error("authentication failed: {0}")]
    Auth(String),
}

impl TransportError {
    pub fn is_transient(&self) -> bool {
        match self {
            TransportError::Transport { transient, .. } => *transient,
            TransportError::RateLimited { .. } => true,
            TransportError::Auth(_) => false,
        }
    }

    fn transient(message: impl Into<String>) -> Self {
        TransportError::Transport {
            message: message.into(),
            transient: true,
        }
    }

    fn fatal(message: impl Into<String>) -> Self {
        TransportError::Transport {
            message: message.into(),
            transient: false,
        }
    }
}

/// One chat completion per call: system + user message in, text out.
pub trait ChatTransport: Send {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct HttpConfig {
    pub base_url: String,
    pub timeout: Duration,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            timeout: Duration::from_secs(60),
        }
    }
}

/// Chat-completions client for OpenAI-style endpoints.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    api_key: String,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("url", &self.url).finish_non_exhaustive()
    }
}

impl HttpTransport {
    pub fn new(config: &HttpConfig, api_key: impl Into<String>) -> Result<Self, TransportError> {
        let api_key = api_key.into();
        if api_key.trim().is_empty() {
            return Err(TransportError::Auth("empty API key".into()));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpTransport {
            agent,
            url: format!("{}/chat/completions", config.base_url.trim_end_matches('/')),
            api_key,
        })
    }

    /// Reads the key from [`API_KEY_ENV`]; fails before touching the network
    /// when it is unset.
    pub fn from_env(config: &HttpConfig) -> Result<Self, TransportError> {
        Self::from_env_var(config, API_KEY_ENV)
    }

    pub fn from_env_var(config: &HttpConfig, var: &str) -> Result<Self, TransportError> {
        match std::env::var(var) {
            Ok(key) if !key.trim().is_empty() => Self::new(config, key),
            _ => Err(TransportError::Auth(format!("{var} is not set"))),
        }
    }
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

impl ChatTransport for HttpTransport {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError> {
        let body = json!({
            "model": request.model,
            "temperature": request.temperature,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        });
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(&body)
            .map_err(|e| TransportError::transient(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<f64>().ok())
            .map(Duration::from_secs_f64);
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::transient(e.to_string()))?;
        match status {
            200..=299 => {}
            401 | 403 => return Err(TransportError::Auth(format!("HTTP {status}"))),
            429 => return Err(TransportError::RateLimited { retry_after }),
            500..=599 => return Err(TransportError::transient(format!("HTTP {status}: {text}"))),
            _ => return Err(TransportError::fatal(format!("HTTP {status}: {text}"))),
        }
        let parsed: Completion =
            serde_json::from_str(&text).map_err(|e| TransportError::fatal(format!("bad completion body: {e}")))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| TransportError::fatal("completion has no message content"))
    }
}

/// Retries transient failures with exponential backoff, honouring a
/// server-provided retry delay when there is one.
pub struct Retrying<T> {
    inner: T,
    pub max_retries: usize,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl<T: ChatTransport> Retrying<T> {
    pub fn new(inner: T, max_retries: usize) -> Self {
        Retrying {
            inner,
            max_retries,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }

    pub fn with_delays(mut self, base: Duration, max: Duration) -> Self {
        self.base_delay = base;
        self.max_delay = max;
        self
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: ChatTransport> ChatTransport for Retrying<T> {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError> {
        let mut attempt = 0;
        loop {
            match self.inner.complete(request) {
                Err(e) if e.is_transient() && attempt < self.max_retries => {
                    let backoff = self.base_delay.saturating_mul(1 << attempt.min(16)).min(self.max_delay);
                    let wait = match &e {
                        TransportError::RateLimited { retry_after: Some(d) } => (*d).min(self.max_delay),
                        _ => backoff,
                    };
                    log::warn!("chat completion failed ({e}); retry {} in {wait:?}", attempt + 1);
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

/// Replays canned outcomes in order and records what it was asked.
#[derive(Debug, Default)]
pub struct ScriptedTransport {
    replies: VecDeque<Result<String, TransportError>>,
    pub requests: Vec<ChatRequest>,
}

impl ScriptedTransport {
    pub fn new<I: IntoIterator<Item = String>>(replies: I) -> Self {
        ScriptedTransport {
            replies: replies.into_iter().map(Ok).collect(),
            requests: Vec::new(),
        }
    }

    pub fn with_outcomes<I: IntoIterator<Item = Result<String, TransportError>>>(outcomes: I) -> Self {
        ScriptedTransport {
            replies: outcomes.into_iter().collect(),
            requests: Vec::new(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.replies.len()
    }
}

impl ChatTransport for ScriptedTransport {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError> {
        self.requests.push(request.clone());
        self.replies
            .pop_front()
            .unwrap_or_else(|| Err(TransportError::fatal("scripted transport has no replies left")))
    }
}

impl<T: ChatTransport + ?Sized> ChatTransport for Box<T> {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}
