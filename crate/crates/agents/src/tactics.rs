//! Numbered team plans and the opponent hypothesis.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const OPEN_TAG: &str = "<tactics>";
pub const CLOSE_TAG: &str = "</tactics>";
pub const MAX_LINES: usize = 6;
/// Used when the model never produces a parseable plan.
pub const FALLBACK_LINE: &str = "All players harvest in own area";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TacticsError {
    #[error("no {OPEN_TAG} ... {CLOSE_TAG} block in the response")]
    MissingTags,
    #[error("the tactics block is empty")]
    Empty,
}

/// At most [`MAX_LINES`] plan lines, stored without their numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Tactics {
    lines: Vec<String>,
}

impl Tactics {
    /// Keeps the first [`MAX_LINES`] non-empty lines, logging a warning when
    /// more were given.
    pub fn new<I, S>(lines: I) -> Result<Self, TacticsError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lines: Vec<String> = lines
            .into_iter()
            .map(|l| strip_number(l.as_ref()).to_string())
            .filter(|l| !l.is_empty())
            .collect();
        if lines.is_empty() {
            return Err(TacticsError::Empty);
        }
        if lines.len() > MAX_LINES {
            log::warn!("tactics had {} lines; keeping the first {MAX_LINES}", lines.len());
            lines.truncate(MAX_LINES);
        }
        Ok(Self { lines })
    }

    pub fn fallback() -> Self {
        Self { lines: vec![FALLBACK_LINE.to_string()] }
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

impl TryFrom<Vec<String>> for Tactics {
    type Error = TacticsError;

    fn try_from(lines: Vec<String>) -> Result<Self, Self::Error> {
        Tactics::new(lines)
    }
}

impl From<Tactics> for Vec<String> {
    fn from(t: Tactics) -> Self {
        t.lines
    }
}

impl fmt::Display for Tactics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.lines.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}. {line}", i + 1)?;
        }
        Ok(())
    }
}

/// Drops a leading `3.`, `3)`, `-` or `*` marker.
fn strip_number(line: &str) -> &str {
    let t = line.trim();
    let rest = t.trim_start_matches(|c: char| c.is_ascii_digit());
    if rest.len() < t.len() {
        return match rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            Some(r) => r.trim(),
            None => t,
        };
    }
    t.strip_prefix('-').or_else(|| t.strip_prefix('*')).map_or(t, str::trim)
}

/// The text between the first tactics tags.
pub fn tagged_block(response: &str) -> Option<&str> {
    let start = response.find(OPEN_TAG)? + OPEN_TAG.len();
    let len = response[start..].find(CLOSE_TAG)?;
    Some(&response[start..start + len])
}

pub fn parse_tactics(response: &str) -> Result<Tactics, TacticsError> {
    let block = tagged_block(response).ok_or(TacticsError::MissingTags)?;
    Tactics::new(block.lines())
}

/// What the team believes the opponents are doing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpponentTactics {
    #[default]
    Unknown,
    Known(Tactics),
}

impl OpponentTactics {
    /// Reads a tagged block; the single word `unknown` maps to [`Unknown`](Self::Unknown).
    pub fn parse(response: &str) -> Result<Self, TacticsError> {
        let block = tagged_block(response).ok_or(TacticsError::MissingTags)?;
        if block.trim().eq_ignore_ascii_case("unknown") {
            return Ok(OpponentTactics::Unknown);
        }
        Tactics::new(block.lines()).map(OpponentTactics::Known)
    }
}

impl fmt::Display for OpponentTactics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpponentTactics::Unknown => f.write_str("unknown"),
            OpponentTactics::Known(t) => t.fmt(f),
        }
    }
}
