//! Re-running a recorded episode and checking it matches.
//!
//! Systems persist across a matchup's episodes, so replaying episode `e`
//! replays episodes `0..=e` of its matchup with fresh systems. Model-backed
//! sides get their recorded responses back in order, so the replay needs no
//! live model even if the run used one.

use std::path::Path;
use std::sync::Arc;

use arena_core::scenarios::Scenario;
use arena_core::team::LlmCallRecord;
use arena_core::world::{Event, Team};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::BenchError;
use crate::record::{read_jsonl, EpisodeRecord, TranscriptLine, CONFIG_FILE, SCORES_FILE};
use crate::runner::{play_series, Matchup};
use crate::systems::{self, ClientSource};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub id: String,
    /// Episodes re-played to reach the requested one.
    pub episodes_played: u32,
    pub recorded: (u32, u32),
    pub replayed: (u32, u32),
    /// The full record (scores, timelines, call stats) matches.
    pub record_matches: bool,
    pub events_match: bool,
}

impl ReplayOutcome {
    pub fn identical(&self) -> bool {
        self.record_matches && self.events_match
    }
}

fn transcripts(dir: &Path, team: Team) -> Result<Vec<LlmCallRecord>, BenchError> {
    let path = dir.join("transcripts.jsonl");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let lines: Vec<TranscriptLine> = read_jsonl(&path)?;
    Ok(lines.into_iter().filter(|l| l.team == team).map(|l| l.call).collect())
}

pub fn replay(run_dir: &Path, id: &str) -> Result<ReplayOutcome, BenchError> {
    let config = RunConfig::load(&run_dir.join(CONFIG_FILE), &[])?;
    let records: Vec<EpisodeRecord> = read_jsonl(&run_dir.join(SCORES_FILE))?;
    let target = records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| BenchError::Replay(format!("no episode `{id}` in {}", run_dir.display())))?;
    let key = &target.key;
    if key.stage.as_deref().is_some_and(|s| s != "selfplay") {
        return Err(BenchError::Replay("checkpoint evaluations start from a saved state; replay its training episodes instead".into()));
    }
    let m = Matchup {
        scenario: key.scenario,
        red: key.red.clone(),
        blue: key.blue.clone(),
        repeat: key.repeat,
        run_seed: target.run_seed,
        episodes: key.episode + 1,
        stage: key.stage.clone(),
    };
    if m.episode_id(key.episode) != id {
        return Err(BenchError::Replay(format!("episode id `{id}` does not match its own key")));
    }
    let episodes_root = run_dir.join("episodes");
    let source = |team: Team, llm: bool| -> Result<ClientSource, BenchError> {
        if !llm {
            return Ok(ClientSource::Configured);
        }
        let mut calls = Vec::new();
        for e in 0..=key.episode {
            calls.extend(transcripts(&episodes_root.join(m.episode_id(e)), team)?);
        }
        Ok(ClientSource::Replay(calls))
    };
    let s = Arc::new(Scenario::builtin(m.scenario));
    let mut red = systems::build(&m.red, &s, &config, m.system_seed("red"), source(Team::Red, m.red.is_llm())?)?;
    let mut blue = systems::build(&m.blue, &s, &config, m.system_seed("blue"), source(Team::Blue, m.blue.is_llm())?)?;
    let played = play_series(&m, &s, red.as_mut(), blue.as_mut(), 0..m.episodes, config.keep_observations, None)?;
    let (record, result) = played.last().expect("at least one episode");
    let events: Vec<Event> = read_jsonl(&episodes_root.join(id).join("events.jsonl"))?;
    Ok(ReplayOutcome {
        id: id.to_string(),
        episodes_played: m.episodes,
        recorded: target.points(),
        replayed: record.points(),
        record_matches: record == target,
        events_match: result.events == events,
    })
}
