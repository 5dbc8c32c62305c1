use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{estimate_tokens, ChatClient, ChatRequest, ChatResponse, LlmError};

/// Settings for an OpenAI-compatible chat-completions endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    /// Base URL up to and including the version path, e.g. `https://api.openai.com/v1`.
    pub base_url: String,
    /// Environment variable holding the API key. An empty name sends no key.
    pub api_key_env: String,
    pub timeout_secs: u64,
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// First backoff delay; doubled on each retry.
    pub backoff_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 120,
            max_retries: 2,
            backoff_ms: 1000,
        }
    }
}

pub struct HttpClient {
    config: HttpConfig,
    key: Option<String>,
    agent: reqwest::blocking::Client,
}

impl HttpClient {
    pub fn new(config: HttpConfig) -> Result<Self, LlmError> {
        let key = if config.api_key_env.is_empty() {
            None
        } else {
            Some(
                std::env::var(&config.api_key_env)
                    .map_err(|_| LlmError::MissingKey(config.api_key_env.clone()))?,
            )
        };
        let agent = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self { config, key, agent })
    }

    fn attempt(&self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": request.model,
            "messages": request.messages,
            "temperature": request.temperature,
        });
        let started = Instant::now();
        let mut req = self.agent.post(url).json(&body);
        if let Some(key) = &self.key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| LlmError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| LlmError::Transport(e.to_string()))?;
        let latency = started.elapsed().as_secs_f64();
        if !status.is_success() {
            return Err(LlmError::Status { status: status.as_u16(), body: text });
        }
        let parsed: WireResponse =
            serde_json::from_str(&text).map_err(|e| LlmError::Malformed(e.to_string()))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| LlmError::Malformed("no choices".into()))?;
        let tokens = parsed
            .usage
            .and_then(|u| u.completion_tokens)
            .unwrap_or_else(|| estimate_tokens(&content));
        Ok(ChatResponse { text: content, tokens, latency })
    }
}

fn retryable(err: &LlmError) -> bool {
    match err {
        LlmError::Transport(_) => true,
        LlmError::Status { status, .. } => *status == 429 || *status >= 500,
        _ => false,
    }
}

impl ChatClient for HttpClient {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            match self.attempt(request) {
                Ok(r) => return Ok(r),
                Err(e) if attempt < self.config.max_retries && retryable(&e) => {
                    log::warn!("model call failed ({e}); retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    completion_tokens: Option<u32>,
}
