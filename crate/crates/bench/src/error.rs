use std::path::PathBuf;

use arena_agents::llm::LlmError;
use arena_agents::CheckpointError;
use arena_core::opponents::OpponentError;
use arena_core::world::WorldError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Opponent(#[from] OpponentError),
    #[error("model client: {0}")]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} cannot be checkpointed")]
    NotCheckpointable(String),
    #[error("replay: {0}")]
    Replay(String),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>) -> impl FnOnce(serde_json::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Json { path, source }
    }
}
