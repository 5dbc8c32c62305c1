//! Saved learning state of a tactics team.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::CausalGraph;
use crate::tactics::{OpponentTactics, Tactics};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint version {found} is not supported (expected {CHECKPOINT_VERSION})")]
    Version { found: u32 },
    #[error("bad checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub version: u32,
    /// Episodes played so far.
    pub episode: u32,
    pub tactics: Option<Tactics>,
    pub opponent: OpponentTactics,
    pub graph: CausalGraph,
}

impl Checkpoint {
    /// The state of a team that has not played yet.
    pub fn fresh() -> Self {
        Self { version: CHECKPOINT_VERSION, ..Self::default() }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CheckpointError> {
        #[derive(Deserialize)]
        struct Header {
            version: u32,
        }
        let header: Header = serde_json::from_str(text)?;
        if header.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::Version { found: header.version });
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CheckpointError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CheckpointError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
