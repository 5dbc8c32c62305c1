//! Builds team systems from their config names.

use std::sync::Arc;

use arena_agents::llm::{ChatClient, HttpClient, LlmSession, MockClient, ReplayClient};
use arena_agents::{Checkpoint, CotTeam, PromptTemplates, TacticsTeam};
use arena_core::opponents::{BuiltinTeam, RandomTeam};
use arena_core::scenarios::Scenario;
use arena_core::team::{LlmCallRecord, TeamSystem};

use crate::config::{ClientKind, RunConfig, SystemSpec};
use crate::error::BenchError;

/// Where a model-backed system gets its responses.
#[derive(Clone, Debug, Default)]
pub enum ClientSource {
    /// The client described by the run config.
    #[default]
    Configured,
    /// Recorded calls, played back in order.
    Replay(Vec<LlmCallRecord>),
}

pub fn client(config: &RunConfig, source: ClientSource) -> Result<Box<dyn ChatClient>, BenchError> {
    Ok(match source {
        ClientSource::Replay(records) => Box::new(ReplayClient::new(records)),
        ClientSource::Configured => match config.model.client {
            ClientKind::Mock => Box::new(
                MockClient::from_config(&config.model.mock)
                    .map_err(BenchError::io(config.model.mock.script_dir.clone().unwrap_or_default()))?,
            ),
            ClientKind::Http => Box::new(HttpClient::new(config.model.http.clone())?),
        },
    })
}

fn session(config: &RunConfig, source: ClientSource) -> Result<LlmSession, BenchError> {
    let mut s = LlmSession::new(client(config, source)?, config.model.model.clone());
    s.temperature = config.model.temperature;
    Ok(s)
}

/// A fresh system for `spec`. `seed` only matters for the random system.
pub fn build(
    spec: &SystemSpec,
    scenario: &Arc<Scenario>,
    config: &RunConfig,
    seed: u64,
    source: ClientSource,
) -> Result<Box<dyn TeamSystem>, BenchError> {
    Ok(match spec {
        SystemSpec::Tactics => Box::new(tactics(config, source)?),
        SystemSpec::Cot => Box::new(CotTeam::new(session(config, source)?, PromptTemplates::builtin())),
        SystemSpec::Random => Box::new(RandomTeam::new(seed)),
        SystemSpec::Builtin(name) => Box::new(BuiltinTeam::named(name, Arc::clone(scenario))?),
    })
}

/// A tactics system restored from a checkpoint; the checkpoint itself is untouched.
pub fn restore(config: &RunConfig, checkpoint: &Checkpoint, source: ClientSource) -> Result<TacticsTeam, BenchError> {
    Ok(TacticsTeam::from_checkpoint(session(config, source)?, PromptTemplates::builtin(), checkpoint.clone())
        .with_settings(config.team.clone()))
}

/// A fresh tactics system, typed so callers can take checkpoints.
pub fn tactics(config: &RunConfig, source: ClientSource) -> Result<TacticsTeam, BenchError> {
    Ok(TacticsTeam::new(session(config, source)?, PromptTemplates::builtin()).with_settings(config.team.clone()))
}
