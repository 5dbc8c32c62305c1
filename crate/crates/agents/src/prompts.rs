//! Prompt templates with `{{slot}}` markers.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

const BUILTIN: &str = include_str!("../assets/prompts.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateId {
    TacticsInit,
    TacticsUpdate,
    CausalInit,
    CausalUpdate,
    OpponentUpdate,
    Action,
    Critic,
    Cot,
}

impl TemplateId {
    pub const ALL: [TemplateId; 8] = [
        TemplateId::TacticsInit,
        TemplateId::TacticsUpdate,
        TemplateId::CausalInit,
        TemplateId::CausalUpdate,
        TemplateId::OpponentUpdate,
        TemplateId::Action,
        TemplateId::Critic,
        TemplateId::Cot,
    ];

    pub fn key(self) -> &'static str {
        match self {
            TemplateId::TacticsInit => "tactics_init",
            TemplateId::TacticsUpdate => "tactics_update",
            TemplateId::CausalInit => "causal_init",
            TemplateId::CausalUpdate => "causal_update",
            TemplateId::OpponentUpdate => "opponent_update",
            TemplateId::Action => "action",
            TemplateId::Critic => "critic",
            TemplateId::Cot => "cot",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("template `{0}` is missing")]
    Missing(&'static str),
    #[error("slot `{slot}` in template `{template}` was not filled")]
    Unfilled { template: &'static str, slot: String },
    #[error("unterminated slot marker in template `{0}`")]
    Unterminated(&'static str),
    #[error("bad template file: {0}")]
    Toml(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    system: String,
    templates: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PromptTemplates {
    pub system: String,
    templates: BTreeMap<String, String>,
}

impl PromptTemplates {
    pub fn builtin() -> Self {
        Self::from_toml(BUILTIN).expect("bundled prompts are valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, PromptError> {
        let file: TemplateFile = toml::from_str(text).map_err(|e| PromptError::Toml(e.to_string()))?;
        let this = Self { system: file.system.trim().to_string(), templates: file.templates };
        for id in TemplateId::ALL {
            this.slots(id)?;
        }
        Ok(this)
    }

    pub fn text(&self, id: TemplateId) -> Result<&str, PromptError> {
        self.templates
            .get(id.key())
            .map(String::as_str)
            .ok_or(PromptError::Missing(id.key()))
    }

    /// Slot names in order of first appearance.
    pub fn slots(&self, id: TemplateId) -> Result<Vec<String>, PromptError> {
        let mut out: Vec<String> = Vec::new();
        for piece in pieces(self.text(id)?, id)? {
            if let Piece::Slot(s) = piece {
                if !out.iter().any(|x| x == s) {
                    out.push(s.to_string());
                }
            }
        }
        Ok(out)
    }

    /// Substitutes every slot. Values are inserted verbatim and never rescanned.
    pub fn fill(&self, id: TemplateId, values: &[(&str, &str)]) -> Result<String, PromptError> {
        let mut out = String::new();
        for piece in pieces(self.text(id)?, id)? {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Slot(s) => {
                    let value = values
                        .iter()
                        .find(|(k, _)| *k == s)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| PromptError::Unfilled { template: id.key(), slot: s.to_string() })?;
                    out.push_str(value);
                }
            }
        }
        Ok(out.trim().to_string())
    }
}

enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn is_slot_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn pieces(mut text: &str, id: TemplateId) -> Result<Vec<Piece<'_>>, PromptError> {
    let mut out = Vec::new();
    while let Some(start) = text.find("{{") {
        let after = &text[start + 2..];
        let end = after.find("}}").ok_or(PromptError::Unterminated(id.key()))?;
        let name = &after[..end];
        if is_slot_name(name) {
            out.push(Piece::Text(&text[..start]));
            out.push(Piece::Slot(name));
        } else {
            out.push(Piece::Text(&text[..start + 2]));
            text = after;
            continue;
        }
        text = &after[end + 2..];
    }
    out.push(Piece::Text(text));
    Ok(out)
}
