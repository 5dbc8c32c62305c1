//! Chat-completion clients and call recording.

mod http;
mod mock;
mod rules;

use std::collections::BTreeMap;
use std::fmt;

use arena_core::team::LlmCallRecord;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::{HttpClient, HttpConfig};
pub use mock::{MockClient, MockConfig, ReplayClient};
pub use rules::{hint as rule_hints, respond as rule_response};

pub const DEFAULT_TEMPERATURE: f32 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }
}

/// What a call is for. Recorded with every call and used by the mock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    TacticsInit,
    TacticsUpdate,
    CausalInit,
    CausalUpdate,
    OpponentUpdate,
    Action,
    Critic,
    Cot,
}

impl Purpose {
    pub const ALL: [Purpose; 8] = [
        Purpose::TacticsInit,
        Purpose::TacticsUpdate,
        Purpose::CausalInit,
        Purpose::CausalUpdate,
        Purpose::OpponentUpdate,
        Purpose::Action,
        Purpose::Critic,
        Purpose::Cot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::TacticsInit => "tactics_init",
            Purpose::TacticsUpdate => "tactics_update",
            Purpose::CausalInit => "causal_init",
            Purpose::CausalUpdate => "causal_update",
            Purpose::OpponentUpdate => "opponent_update",
            Purpose::Action => "action",
            Purpose::Critic => "critic",
            Purpose::Cot => "cot",
        }
    }
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f32,
    pub purpose: Purpose,
    pub agent: Option<String>,
    /// Structured context for offline clients (scenario id, agent names,
    /// layout constants). Never sent over the wire.
    pub hints: BTreeMap<String, String>,
}

impl ChatRequest {
    pub fn new(purpose: Purpose, messages: Vec<Message>) -> Self {
        Self {
            model: String::new(),
            messages,
            temperature: DEFAULT_TEMPERATURE,
            purpose,
            agent: None,
            hints: BTreeMap::new(),
        }
    }

    /// Content of the last user message.
    pub fn prompt(&self) -> &str {
        self.messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map_or("", |m| m.content.as_str())
    }

    pub fn hint(&self, key: &str) -> Option<&str> {
        self.hints.get(key).map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChatResponse {
    pub text: String,
    /// Output tokens.
    pub tokens: u32,
    /// Seconds from request to response.
    pub latency: f64,
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("server returned {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("API key variable `{0}` is not set")]
    MissingKey(String),
    #[error("mock script exhausted")]
    Exhausted,
}

pub trait ChatClient: Send {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, LlmError>;
}

impl<C: ChatClient + ?Sized> ChatClient for Box<C> {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        (**self).complete(request)
    }
}

/// Rough output-token count for servers that do not report usage.
pub fn estimate_tokens(text: &str) -> u32 {
    let words = text.split_whitespace().count() as u32;
    if words == 0 && !text.is_empty() {
        1
    } else {
        words
    }
}

/// Wraps a client with fixed model settings and records every successful call.
pub struct LlmSession {
    client: Box<dyn ChatClient>,
    pub model: String,
    pub temperature: f32,
    pub system_prompt: String,
    records: Vec<LlmCallRecord>,
}

impl LlmSession {
    pub fn new(client: Box<dyn ChatClient>, model: impl Into<String>) -> Self {
        Self {
            client,
            model: model.into(),
            temperature: DEFAULT_TEMPERATURE,
            system_prompt: String::new(),
            records: Vec::new(),
        }
    }

    pub fn with_system_prompt(mut self, prompt: impl Into<String>) -> Self {
        self.system_prompt = prompt.into();
        self
    }

    pub fn ask(
        &mut self,
        purpose: Purpose,
        agent: Option<&str>,
        prompt: String,
        hints: &BTreeMap<String, String>,
    ) -> Result<ChatResponse, LlmError> {
        let mut messages = Vec::with_capacity(2);
        if !self.system_prompt.is_empty() {
            messages.push(Message::system(self.system_prompt.clone()));
        }
        messages.push(Message::user(prompt));
        let request = ChatRequest {
            model: self.model.clone(),
            messages,
            temperature: self.temperature,
            purpose,
            agent: agent.map(str::to_string),
            hints: hints.clone(),
        };
        let response = self.client.complete(&request)?;
        self.records.push(LlmCallRecord {
            purpose: purpose.as_str().to_string(),
            agent: request.agent.clone(),
            t_resp: response.latency,
            n_out: response.tokens,
            prompt: request.prompt().to_string(),
            response: response.text.clone(),
        });
        Ok(response)
    }

    pub fn take_records(&mut self) -> Vec<LlmCallRecord> {
        std::mem::take(&mut self.records)
    }
}
