//! σ calibration: how much a blue system scores when red does nothing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use arena_core::game::{run_episode, EpisodeOptions};
use arena_core::opponents::{BuiltinTeam, DO_NOTHING};
use arena_core::scenarios::{Scenario, ScenarioKind};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SystemSpec};
use crate::error::BenchError;
use crate::metrics::SigmaMap;
use crate::record::{read_json, write_file};
use crate::runner::parallel;
use crate::seeds;
use crate::systems::{self, ClientSource};

pub const CALIBRATION_EPISODES: u32 = 20;
pub const CALIBRATION_SEED: u64 = 0x5eed_ca11;
/// Part of every cache key, so results from older simulators are not reused.
pub const CODE_VERSION: &str = concat!("arena-", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub scenario: ScenarioKind,
    pub blue: SystemSpec,
    pub version: String,
    pub episodes: u32,
    pub red: String,
    /// Raw blue points, one per episode.
    pub blue_scores: Vec<u32>,
    pub sigma: f64,
}

/// σ values cached by scenario, blue system and code version.
#[derive(Clone, Debug, Default)]
pub struct CalibrationTable {
    path: Option<PathBuf>,
    entries: BTreeMap<String, CalibrationEntry>,
    /// Entries simulated (rather than read from the cache) by this table.
    pub computed: usize,
}

fn cache_key(scenario: ScenarioKind, blue: &SystemSpec, config: &RunConfig) -> String {
    let system = if blue.is_llm() {
        format!("{blue}@{:?}:{}", config.model.client, config.model.model).to_lowercase()
    } else {
        blue.to_string()
    };
    format!("{}/{system}/{CODE_VERSION}", scenario.id())
}

impl CalibrationTable {
    /// A table that is never written to disk.
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn load_or_default(path: &Path) -> Result<Self, BenchError> {
        let entries = if path.exists() { read_json(path)? } else { BTreeMap::new() };
        Ok(Self { path: Some(path.to_path_buf()), entries, computed: 0 })
    }

    pub fn save(&self) -> Result<(), BenchError> {
        let Some(path) = &self.path else { return Ok(()) };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
        }
        let json = serde_json::to_string_pretty(&self.entries).expect("entries serialize");
        write_file(path, json.as_bytes())
    }

    pub fn get(&self, scenario: ScenarioKind, blue: &SystemSpec, config: &RunConfig) -> Option<&CalibrationEntry> {
        self.entries.get(&cache_key(scenario, blue, config))
    }

    /// Stores `entry`, replacing any cached value for the same key.
    pub fn insert(&mut self, entry: CalibrationEntry, config: &RunConfig) {
        self.computed += 1;
        self.entries.insert(cache_key(entry.scenario, &entry.blue, config), entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// σ for every pair, simulating (in parallel) only the ones not cached.
    pub fn ensure(&mut self, config: &RunConfig, pairs: &[(ScenarioKind, SystemSpec)]) -> Result<SigmaMap, BenchError> {
        let missing: Vec<_> = pairs.iter().filter(|(k, b)| self.get(*k, b, config).is_none()).cloned().collect();
        let fresh = parallel(config.workers, &missing, |(k, b)| {
            log::info!("calibrating {} vs {}", b, k.id());
            calibrate_sigma(*k, b, config)
        });
        for entry in fresh {
            self.insert(entry?, config);
        }
        Ok(pairs
            .iter()
            .map(|(k, b)| ((*k, b.clone()), self.get(*k, b, config).expect("just ensured").sigma))
            .collect())
    }
}

/// Mean blue score over exactly [`CALIBRATION_EPISODES`] seeded episodes
/// against an idle red team. Blue keeps its state across the episodes.
pub fn calibrate_sigma(scenario: ScenarioKind, blue: &SystemSpec, config: &RunConfig) -> Result<CalibrationEntry, BenchError> {
    let s = Arc::new(Scenario::builtin(scenario));
    let label = blue.to_string();
    let seed_of = |part: &str| seeds::derive(CALIBRATION_SEED, &[scenario.id(), DO_NOTHING, &label, part]);
    let mut red = BuiltinTeam::named(DO_NOTHING, Arc::clone(&s))?;
    let mut blue_sys = systems::build(blue, &s, config, seed_of("blue"), ClientSource::Configured)?;
    let mut blue_scores = Vec::with_capacity(CALIBRATION_EPISODES as usize);
    for episode in 0..CALIBRATION_EPISODES {
        let opts = EpisodeOptions { seed: seed_of(&episode.to_string()), episode, keep_observations: false };
        let r = run_episode(Arc::clone(&s), &mut red, blue_sys.as_mut(), &opts)?;
        blue_scores.push(r.blue.score.points);
    }
    let sigma = blue_scores.iter().map(|&p| p as f64).sum::<f64>() / blue_scores.len() as f64;
    Ok(CalibrationEntry {
        scenario,
        blue: blue.clone(),
        version: CODE_VERSION.to_string(),
        episodes: CALIBRATION_EPISODES,
        red: DO_NOTHING.to_string(),
        blue_scores,
        sigma,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaEntry {
    pub scenario: ScenarioKind,
    pub blue: SystemSpec,
    pub sigma: f64,
}

/// The σ map as a list, for run folders.
pub fn sigma_entries(sigmas: &SigmaMap) -> Vec<SigmaEntry> {
    sigmas.iter().map(|((k, b), s)| SigmaEntry { scenario: *k, blue: b.clone(), sigma: *s }).collect()
}

pub fn sigma_map(entries: Vec<SigmaEntry>) -> SigmaMap {
    entries.into_iter().map(|e| ((e.scenario, e.blue), e.sigma)).collect()
}
