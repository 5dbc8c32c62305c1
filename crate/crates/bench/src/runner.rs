//! Matchup planning and execution.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use arena_core::game::{run_episode, EpisodeOptions, EpisodeResult};
use arena_core::scenarios::{Scenario, ScenarioKind};
use arena_core::team::TeamSystem;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationTable;
use crate::config::{RunConfig, SystemSpec};
use crate::error::BenchError;
use crate::export;
use crate::metrics::{build_report, MetricsReport};
use crate::record::{EpisodeKey, EpisodeRecord, RunFolder, FAILURES_FILE, SIGMA_FILE};
use crate::seeds;
use crate::systems::{self, ClientSource};

/// `N_e` consecutive episodes between one red and one blue system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matchup {
    pub scenario: ScenarioKind,
    pub red: SystemSpec,
    pub blue: SystemSpec,
    pub repeat: u32,
    pub run_seed: u64,
    pub episodes: u32,
    /// Extra path segment and seed input for protocol episodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

impl Matchup {
    /// `scenario/red_vs_blue/r<repeat>`.
    pub fn id(&self) -> String {
        let stage = self.stage.as_ref().map(|s| format!("{s}/")).unwrap_or_default();
        format!("{}/{stage}{}_vs_{}/r{}", self.scenario.id(), self.red.label(), self.blue.label(), self.repeat)
    }

    pub fn episode_id(&self, episode: u32) -> String {
        format!("{}/e{episode}", self.id())
    }

    fn seed(&self, last: &str) -> u64 {
        let mut parts = vec![
            self.scenario.id().to_string(),
            self.red.to_string(),
            self.blue.to_string(),
            self.repeat.to_string(),
        ];
        parts.extend(self.stage.clone());
        parts.push(last.to_string());
        let parts: Vec<&str> = parts.iter().map(String::as_str).collect();
        seeds::derive(self.run_seed, &parts)
    }

    pub fn episode_seed(&self, episode: u32) -> u64 {
        self.seed(&episode.to_string())
    }

    /// Seed for a side's own randomness (the random system).
    pub fn system_seed(&self, side: &str) -> u64 {
        self.seed(side)
    }

    pub fn key(&self, episode: u32) -> EpisodeKey {
        EpisodeKey {
            scenario: self.scenario,
            red: self.red.clone(),
            blue: self.blue.clone(),
            repeat: self.repeat,
            episode,
            stage: self.stage.clone(),
        }
    }
}

/// Every scenario × opponent × repeat, in a fixed order.
pub fn plan(config: &RunConfig) -> Vec<Matchup> {
    let mut out = Vec::new();
    for &scenario in &config.scenarios {
        if !config.red.supports(scenario) {
            continue;
        }
        for blue in config.opponents_for(scenario) {
            for repeat in 0..config.repeats {
                out.push(Matchup {
                    scenario,
                    red: config.red.clone(),
                    blue: blue.clone(),
                    repeat,
                    run_seed: config.seeds[repeat as usize],
                    episodes: config.episodes,
                    stage: None,
                });
            }
        }
    }
    out
}

/// Plays `episodes` in order with the same two systems, writing each
/// finished episode to `sink`.
pub fn play_series(
    m: &Matchup,
    scenario: &Arc<Scenario>,
    red: &mut dyn TeamSystem,
    blue: &mut dyn TeamSystem,
    episodes: std::ops::Range<u32>,
    keep_observations: bool,
    sink: Option<&RunFolder>,
) -> Result<Vec<(EpisodeRecord, EpisodeResult)>, BenchError> {
    let mut out = Vec::new();
    for episode in episodes {
        let opts = EpisodeOptions { seed: m.episode_seed(episode), episode, keep_observations };
        let result = run_episode(Arc::clone(scenario), red, blue, &opts)?;
        let record = EpisodeRecord::new(m.episode_id(episode), m.key(episode), m.run_seed, &result);
        if let Some(folder) = sink {
            folder.write_episode(&record, &result)?;
        }
        out.push((record, result));
    }
    Ok(out)
}

/// Plays a whole matchup with fresh systems.
pub fn play_matchup(m: &Matchup, config: &RunConfig, sink: Option<&RunFolder>) -> Result<Vec<EpisodeRecord>, BenchError> {
    let scenario = Arc::new(Scenario::builtin(m.scenario));
    let mut red = systems::build(&m.red, &scenario, config, m.system_seed("red"), ClientSource::Configured)?;
    let mut blue = systems::build(&m.blue, &scenario, config, m.system_seed("blue"), ClientSource::Configured)?;
    let played =
        play_series(m, &scenario, red.as_mut(), blue.as_mut(), 0..m.episodes, config.keep_observations, sink)?;
    Ok(played.into_iter().map(|(r, _)| r).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchupFailure {
    pub matchup: String,
    pub error: String,
}

/// Runs `f` over `items` on `workers` threads (0 = all cores), keeping input order.
pub fn parallel<T: Sync, R: Send>(workers: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Runs `f`, turning both errors and panics into a failure message.
pub fn guarded<T>(f: impl FnOnce() -> Result<T, BenchError>) -> Result<T, String> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(e.to_string()),
        Err(panic) => Err(panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panicked".into())),
    }
}

pub struct BenchOutcome {
    pub folder: PathBuf,
    pub records: Vec<EpisodeRecord>,
    pub failures: Vec<MatchupFailure>,
    pub report: MetricsReport,
}

/// Calibrates whatever σ is missing, plays every matchup in parallel and
/// writes the run folder with its exports.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchOutcome, BenchError> {
    config.validate()?;
    let folder = RunFolder::create(config, "")?;
    log::info!("run folder {}", folder.path().display());

    let mut table = CalibrationTable::load_or_default(&config.calibration_path())?;
    let matchups = plan(config);
    let mut blues: Vec<(ScenarioKind, SystemSpec)> = matchups.iter().map(|m| (m.scenario, m.blue.clone())).collect();
    blues.sort();
    blues.dedup();
    let sigmas = table.ensure(config, &blues)?;
    table.save()?;
    folder.write_json(SIGMA_FILE, &crate::calibration::sigma_entries(&sigmas))?;

    let results = parallel(config.workers, &matchups, |m| {
        log::info!("matchup {}", m.id());
        guarded(|| play_matchup(m, config, Some(&folder)))
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (m, r) in matchups.iter().zip(results) {
        match r {
            Ok(rs) => records.extend(rs),
            Err(error) => {
                log::error!("matchup {} failed: {error}", m.id());
                failures.push(MatchupFailure { matchup: m.id(), error });
            }
        }
    }
    if !failures.is_empty() {
        folder.write_json(FAILURES_FILE, &failures)?;
    }
    let report = build_report(&records, &sigmas);
    export::write_all(folder.path(), &records, &report)?;
    Ok(BenchOutcome { folder: folder.path().to_path_buf(), records, failures, report })
}
