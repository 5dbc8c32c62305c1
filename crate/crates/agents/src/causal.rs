//! Action → (causes, effects) relations and the graph that collects them.
//!
//! The text form is one relation per line:
//!
//! ```text
//! Action: craftItem(bot, "bread", 1); Cause: ['wheat']; Effect ['bread']
//! ```
//!
//! Models may also answer with a JSON array of
//! `{"action", "causes", "effects"}` objects.

use std::fmt;

use arena_core::actionlang::{parse_source, print_call, Call, PrimitiveTable, Stmt};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CausalError {
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: &'static str },
    #[error("no relations found in the response")]
    NoRelations,
    #[error("bad JSON relations: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalRelation {
    pub action: String,
    #[serde(alias = "cause")]
    pub causes: Vec<String>,
    #[serde(alias = "effect")]
    pub effects: Vec<String>,
}

impl CausalRelation {
    pub fn new(action: impl Into<String>, causes: &[&str], effects: &[&str]) -> Self {
        Self {
            action: action.into(),
            causes: causes.iter().map(|s| s.to_string()).collect(),
            effects: effects.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Name of the primitive the action calls: the identifier before `(`.
    pub fn primitive(&self) -> Option<&str> {
        let head = self.action.split('(').next()?.trim();
        (!head.is_empty() && head.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')).then_some(head)
    }

    /// True when the action is exactly one ActScript call.
    pub fn is_single_call(&self) -> bool {
        parse_source(&self.action)
            .map(|p| matches!(&*p.body, [Stmt::Call(_)]))
            .unwrap_or(false)
    }

    pub fn parse_line(line: &str) -> Result<Self, &'static str> {
        let rest = line.trim().strip_prefix("Action:").ok_or("missing `Action:`")?;
        let rest = rest.strip_prefix(' ').unwrap_or(rest);
        let cause_at = rest.rfind("; Cause: [").ok_or("missing `; Cause: [`")?;
        let action = &rest[..cause_at];
        let rest = &rest[cause_at + "; Cause: [".len()..];
        let (causes, effects) = rest
            .split_once("]; Effect [")
            .or_else(|| rest.split_once("]; Effect: ["))
            .ok_or("missing `; Effect [`")?;
        let effects = effects.strip_suffix(']').ok_or("missing closing `]`")?;
        if action.is_empty() {
            return Err("empty action");
        }
        Ok(Self {
            action: action.to_string(),
            causes: parse_items(causes),
            effects: parse_items(effects),
        })
    }
}

fn parse_items(list: &str) -> Vec<String> {
    list.split(',')
        .map(|s| s.trim().trim_matches(|c| c == '\'' || c == '"').to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[String]) -> fmt::Result {
    f.write_str("[")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "'{item}'")?;
    }
    f.write_str("]")
}

impl fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Action: {}; Cause: ", self.action)?;
        write_items(f, &self.causes)?;
        f.write_str("; Effect ")?;
        write_items(f, &self.effects)
    }
}

/// Parses a model response in either supported format.
///
/// Lines beginning with `Action:` win; otherwise the outermost JSON array
/// (or an object with a `relations` array) is read.
pub fn parse_relations(text: &str) -> Result<Vec<CausalRelation>, CausalError> {
    let line_form: Vec<_> = text
        .lines()
        .map(str::trim)
        .filter(|l| l.starts_with("Action:"))
        .filter_map(|l| CausalRelation::parse_line(l).ok())
        .collect();
    if !line_form.is_empty() {
        return Ok(line_form);
    }
    #[derive(Deserialize)]
    struct Wrapped {
        relations: Vec<CausalRelation>,
    }
    if let (Some(start), Some(end)) = (text.find('['), text.rfind(']')) {
        if start < end {
            return serde_json::from_str(&text[start..=end]).map_err(|e| CausalError::Json(e.to_string()));
        }
    }
    if let (Some(start), Some(end)) = (text.find('{'), text.rfind('}')) {
        if start < end {
            return serde_json::from_str::<Wrapped>(&text[start..=end])
                .map(|w| w.relations)
                .map_err(|e| CausalError::Json(e.to_string()));
        }
    }
    Err(CausalError::NoRelations)
}

/// Relations keyed by exact action text, in insertion order. Never shrinks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<CausalRelation>", into = "Vec<CausalRelation>")]
pub struct CausalGraph {
    relations: IndexMap<String, CausalRelation>,
}

impl CausalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `rel` unless its action is already present. Returns whether it was added.
    pub fn insert(&mut self, rel: CausalRelation) -> bool {
        if self.relations.contains_key(&rel.action) {
            return false;
        }
        self.relations.insert(rel.action.clone(), rel);
        true
    }

    /// Set union by action key. Returns the number of relations added.
    pub fn union<I: IntoIterator<Item = CausalRelation>>(&mut self, other: I) -> usize {
        other.into_iter().map(|r| self.insert(r) as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn get(&self, action: &str) -> Option<&CausalRelation> {
        self.relations.get(action)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CausalRelation> {
        self.relations.values()
    }

    pub fn covers(&self, primitive: &str) -> bool {
        self.iter().any(|r| r.primitive() == Some(primitive))
    }

    /// Adds an empty relation for every available primitive that has none.
    /// Returns the number of stubs added.
    pub fn ensure_coverage(&mut self, table: &PrimitiveTable) -> usize {
        let missing: Vec<&str> = table.available().map(|s| s.name).filter(|n| !self.covers(n)).collect();
        missing
            .into_iter()
            .map(|name| {
                let stub = print_call(&Call::new(name, Vec::new()));
                self.insert(CausalRelation::new(stub, &[], &[])) as usize
            })
            .sum()
    }

    /// Parses the line form; blank lines are skipped, duplicates collapse.
    pub fn from_lines(text: &str) -> Result<Self, CausalError> {
        let mut g = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rel = CausalRelation::parse_line(line).map_err(|reason| CausalError::Line { line: i + 1, reason })?;
            g.insert(rel);
        }
        Ok(g)
    }

    /// One relation per line, each ending in a newline.
    pub fn to_lines(&self) -> String {
        self.iter().map(|r| format!("{r}\n")).collect()
    }

    /// Prompt rendering; `(none yet)` for an empty graph.
    pub fn render(&self) -> String {
        if self.is_empty() {
            "(none yet)".into()
        } else {
            self.to_lines().trim_end().to_string()
        }
    }
}

impl From<Vec<CausalRelation>> for CausalGraph {
    fn from(v: Vec<CausalRelation>) -> Self {
        let mut g = Self::new();
        g.union(v);
        g
    }
}

impl From<CausalGraph> for Vec<CausalRelation> {
    fn from(g: CausalGraph) -> Self {
        g.relations.into_values().collect()
    }
}
