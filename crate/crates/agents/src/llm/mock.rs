use std::collections::VecDeque;
use std::path::Path;

use arena_core::team::LlmCallRecord;
use serde::{Deserialize, Serialize};

use super::{estimate_tokens, rules, ChatClient, ChatRequest, ChatResponse, LlmError};

/// Offline client settings, as they appear in run configs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockConfig {
    /// Reported latency per call, in seconds.
    pub latency: f64,
    /// Reported output tokens per call; estimated from the text when unset.
    pub tokens: Option<u32>,
    /// Directory of response files, replayed in file-name order.
    pub script_dir: Option<String>,
    /// Fail once the script runs out instead of switching to the rule responder.
    pub strict: bool,
}

/// Deterministic stand-in for a model endpoint.
///
/// Scripted responses are returned in order; after that the built-in
/// rule responder answers from the request purpose and hints.
#[derive(Clone, Debug, Default)]
pub struct MockClient {
    script: VecDeque<String>,
    latency: f64,
    tokens: Option<u32>,
    strict: bool,
    /// Transport failures to report before answering.
    failures: u32,
    /// Number of `complete` calls seen, including failed ones.
    pub calls: u32,
}

impl MockClient {
    /// Answers every request with the rule responder.
    pub fn rules() -> Self {
        Self::default()
    }

    pub fn scripted<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            script: responses.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn from_config(config: &MockConfig) -> std::io::Result<Self> {
        let mut client = match &config.script_dir {
            Some(dir) => Self::scripted(read_script_dir(Path::new(dir))?),
            None => Self::rules(),
        };
        client.latency = config.latency;
        client.tokens = config.tokens;
        client.strict = config.strict;
        Ok(client)
    }

    pub fn with_latency(mut self, seconds: f64) -> Self {
        self.latency = seconds;
        self
    }

    pub fn with_tokens(mut self, tokens: u32) -> Self {
        self.tokens = Some(tokens);
        self
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn failing_first(mut self, failures: u32) -> Self {
        self.failures = failures;
        self
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

fn read_script_dir(dir: &Path) -> std::io::Result<Vec<String>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths.iter().map(std::fs::read_to_string).collect()
}

impl ChatClient for MockClient {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        self.calls += 1;
        if self.failures > 0 {
            self.failures -= 1;
            return Err(LlmError::Transport("injected failure".into()));
        }
        let text = match self.script.pop_front() {
            Some(text) => text,
            None if self.strict => return Err(LlmError::Exhausted),
            None => rules::respond(request),
        };
        let tokens = self.tokens.unwrap_or_else(|| estimate_tokens(&text));
        Ok(ChatResponse { text, tokens, latency: self.latency })
    }
}

/// Plays back recorded calls in order, with their original latency and
/// token counts. Used to re-run episodes played against a live model.
#[derive(Clone, Debug, Default)]
pub struct ReplayClient {
    records: VecDeque<LlmCallRecord>,
}

impl ReplayClient {
    pub fn new(records: impl IntoIterator<Item = LlmCallRecord>) -> Self {
        Self { records: records.into_iter().collect() }
    }

    pub fn remaining(&self) -> usize {
        self.records.len()
    }
}

impl ChatClient for ReplayClient {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let rec = self.records.pop_front().ok_or(LlmError::Exhausted)?;
        if rec.purpose != request.purpose.as_str() || rec.agent != request.agent {
            return Err(LlmError::Malformed(format!(
                "replay expected a {} call for {:?}, got {} for {:?}",
                rec.purpose, rec.agent, request.purpose, request.agent
            )));
        }
        Ok(ChatResponse { text: rec.response, tokens: rec.n_out, latency: rec.t_resp })
    }
}
