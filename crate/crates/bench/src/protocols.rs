//! The adaptation and self-play protocols.
//!
//! Adaptation: for each opponent, play `episodes` games, checkpoint, then
//! play one more game from that checkpoint against every opponent. Rows
//! compare the games against the opponent the checkpoint trained on
//! ("same") with the rest ("different").
//!
//! Self-play: two tactics systems play each other; red is checkpointed every
//! few episodes and each checkpoint plays one game against every built-in.

use std::path::PathBuf;
use std::sync::Arc;

use arena_agents::Checkpoint;
use arena_core::opponents;
use arena_core::scenarios::{Scenario, ScenarioKind};
use serde::{Deserialize, Serialize};

use crate::calibration::{sigma_entries, CalibrationTable};
use crate::config::{RunConfig, SystemSpec};
use crate::error::BenchError;
use crate::export::num;
use crate::metrics::{mean_metrics, pooled_metrics, report_scale, Metrics, Scored, SigmaMap};
use crate::record::{EpisodeRecord, RunFolder, SIGMA_FILE};
use crate::runner::{parallel, play_series, Matchup};
use crate::systems::{self, ClientSource};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Same,
    Different,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptationRow {
    /// `MW`, `DD` or `Avg`.
    pub scope: String,
    pub split: Split,
    pub episodes: usize,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptationEval {
    pub trained_against: SystemSpec,
    pub record: EpisodeRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptationReport {
    pub rows: Vec<AdaptationRow>,
    pub training: Vec<EpisodeRecord>,
    pub evaluations: Vec<AdaptationEval>,
}

impl AdaptationReport {
    pub fn row(&self, scope: &str, split: Split) -> Option<&AdaptationRow> {
        self.rows.iter().find(|r| r.scope == scope && r.split == split)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scope,split,episodes,p,s,d,w\n");
        for r in &self.rows {
            let m = &r.metrics;
            let split = if r.split == Split::Same { "same" } else { "different" };
            out += &format!("{},{split},{},{},{},{},{}\n", r.scope, r.episodes, num(m.p), num(m.s), num(m.d), num(m.w));
        }
        out
    }
}

fn stage_matchup(scenario: ScenarioKind, blue: &SystemSpec, repeat: u32, config: &RunConfig, stage: Option<String>) -> Matchup {
    Matchup {
        scenario,
        red: SystemSpec::Tactics,
        blue: blue.clone(),
        repeat,
        run_seed: config.seeds[repeat as usize],
        episodes: config.episodes,
        stage,
    }
}

fn require_tactics(config: &RunConfig) -> Result<(), BenchError> {
    if config.red != SystemSpec::Tactics {
        return Err(BenchError::NotCheckpointable(config.red.to_string()));
    }
    Ok(())
}

/// Plays one episode from `checkpoint`, leaving the checkpoint as it was.
fn evaluate(
    m: &Matchup,
    episode: u32,
    checkpoint: &Checkpoint,
    config: &RunConfig,
    sink: Option<&RunFolder>,
) -> Result<EpisodeRecord, BenchError> {
    let s = Arc::new(Scenario::builtin(m.scenario));
    let mut red = systems::restore(config, checkpoint, ClientSource::Configured)?;
    let mut blue = systems::build(&m.blue, &s, config, m.system_seed("blue"), ClientSource::Configured)?;
    let mut played = play_series(m, &s, &mut red, blue.as_mut(), episode..episode + 1, config.keep_observations, sink)?;
    Ok(played.remove(0).0)
}

pub fn adaptation_protocol(
    config: &RunConfig,
    sigmas: &SigmaMap,
    sink: Option<&RunFolder>,
) -> Result<AdaptationReport, BenchError> {
    require_tactics(config)?;
    let mut units = Vec::new();
    for &k in &config.scenarios {
        for blue in config.opponents_for(k) {
            for repeat in 0..config.repeats {
                units.push(stage_matchup(k, &blue, repeat, config, None));
            }
        }
    }
    let trained = parallel(config.workers, &units, |m| -> Result<_, BenchError> {
        log::info!("adaptation training {}", m.id());
        let s = Arc::new(Scenario::builtin(m.scenario));
        let mut red = systems::tactics(config, ClientSource::Configured)?;
        let mut blue = systems::build(&m.blue, &s, config, m.system_seed("blue"), ClientSource::Configured)?;
        let played =
            play_series(m, &s, &mut red, blue.as_mut(), 0..m.episodes, config.keep_observations, sink)?;
        Ok((red.to_checkpoint(), played.into_iter().map(|(r, _)| r).collect::<Vec<_>>()))
    });
    let mut training = Vec::new();
    let mut evals = Vec::new();
    for (m, t) in units.iter().zip(trained) {
        let (checkpoint, records) = t?;
        training.extend(records);
        for opponent in config.opponents_for(m.scenario) {
            let stage = Some(format!("from_{}", m.blue.label()));
            evals.push((m.blue.clone(), stage_matchup(m.scenario, &opponent, m.repeat, config, stage), checkpoint.clone()));
        }
    }
    let results = parallel(config.workers, &evals, |(_, m, cp)| evaluate(m, config.episodes, cp, config, sink));
    let mut evaluations = Vec::new();
    for ((trained_against, _, _), r) in evals.into_iter().zip(results) {
        evaluations.push(AdaptationEval { trained_against, record: r? });
    }
    let rows = adaptation_rows(config, &evaluations, sigmas);
    Ok(AdaptationReport { rows, training, evaluations })
}

fn adaptation_rows(config: &RunConfig, evals: &[AdaptationEval], sigmas: &SigmaMap) -> Vec<AdaptationRow> {
    let mut rows = Vec::new();
    for &k in &config.scenarios {
        for split in [Split::Same, Split::Different] {
            let scored: Vec<Scored> = evals
                .iter()
                .filter(|e| e.record.key.scenario == k && (e.trained_against == e.record.key.blue) == (split == Split::Same))
                .map(|e| Scored {
                    red: e.record.red_side.points,
                    blue: e.record.blue_side.points,
                    sigma_blue: sigmas.get(&(k, e.record.key.blue.clone())).copied().unwrap_or(0.0),
                })
                .collect();
            if scored.is_empty() {
                continue;
            }
            let metrics = pooled_metrics(&scored, report_scale(k));
            rows.push(AdaptationRow { scope: k.short().to_string(), split, episodes: scored.len(), metrics });
        }
    }
    for split in [Split::Same, Split::Different] {
        let per: Vec<&AdaptationRow> = rows.iter().filter(|r| r.split == split).collect();
        let metrics: Vec<Metrics> = per.iter().map(|r| r.metrics).collect();
        if let Some(metrics) = mean_metrics(&metrics) {
            let episodes = per.iter().map(|r| r.episodes).sum();
            rows.push(AdaptationRow { scope: "Avg".into(), split, episodes, metrics });
        }
    }
    rows
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfPlaySeries {
    pub scenario: ScenarioKind,
    pub repeat: u32,
    pub red_scores: Vec<u32>,
    pub blue_scores: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointPoint {
    pub scenario: ScenarioKind,
    /// Self-play episodes played before the checkpoint.
    pub checkpoint: u32,
    pub evaluations: usize,
    /// Pooled over every built-in and repeat.
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfPlayReport {
    pub series: Vec<SelfPlaySeries>,
    pub checkpoints: Vec<CheckpointPoint>,
    pub training: Vec<EpisodeRecord>,
    pub evaluations: Vec<EpisodeRecord>,
}

impl SelfPlayReport {
    pub fn checkpoints_csv(&self) -> String {
        let mut out = String::from("scenario,checkpoint,evaluations,p,s,d,w\n");
        for c in &self.checkpoints {
            let m = &c.metrics;
            out += &format!(
                "{},{},{},{},{},{},{}\n",
                c.scenario.id(),
                c.checkpoint,
                c.evaluations,
                num(m.p),
                num(m.s),
                num(m.d),
                num(m.w)
            );
        }
        out
    }

    pub fn scores_csv(&self) -> String {
        let mut out = String::from("scenario,repeat,episode,red,blue\n");
        for s in &self.series {
            for (i, (r, b)) in s.red_scores.iter().zip(&s.blue_scores).enumerate() {
                out += &format!("{},{},{i},{r},{b}\n", s.scenario.id(), s.repeat);
            }
        }
        out
    }
}

pub fn self_play_protocol(
    config: &RunConfig,
    sigmas: &SigmaMap,
    sink: Option<&RunFolder>,
) -> Result<SelfPlayReport, BenchError> {
    require_tactics(config)?;
    let sp = &config.selfplay;
    let units: Vec<Matchup> = config
        .scenarios
        .iter()
        .flat_map(|&k| (0..config.repeats).map(move |r| (k, r)))
        .map(|(k, r)| Matchup { episodes: sp.episodes, ..stage_matchup(k, &SystemSpec::Tactics, r, config, Some("selfplay".into())) })
        .collect();
    let trained = parallel(config.workers, &units, |m| -> Result<_, BenchError> {
        log::info!("self-play {}", m.id());
        let s = Arc::new(Scenario::builtin(m.scenario));
        let mut red = systems::tactics(config, ClientSource::Configured)?;
        let mut blue = systems::tactics(config, ClientSource::Configured)?;
        let mut records = Vec::new();
        let mut checkpoints = Vec::new();
        for e in 0..m.episodes {
            let played = play_series(m, &s, &mut red, &mut blue, e..e + 1, config.keep_observations, sink)?;
            records.extend(played.into_iter().map(|(r, _)| r));
            if (e + 1) % sp.checkpoint_every == 0 {
                checkpoints.push((e + 1, red.to_checkpoint()));
            }
        }
        Ok((records, checkpoints))
    });
    let mut series = Vec::new();
    let mut training = Vec::new();
    let mut evals = Vec::new();
    for (m, t) in units.iter().zip(trained) {
        let (records, checkpoints) = t?;
        series.push(SelfPlaySeries {
            scenario: m.scenario,
            repeat: m.repeat,
            red_scores: records.iter().map(|r| r.red_side.points).collect(),
            blue_scores: records.iter().map(|r| r.blue_side.points).collect(),
        });
        training.extend(records);
        for (at, cp) in checkpoints {
            for name in opponents::names(m.scenario) {
                let blue = SystemSpec::Builtin(name.to_string());
                let stage = Some(format!("checkpoint{at}"));
                evals.push((at, stage_matchup(m.scenario, &blue, m.repeat, config, stage), cp.clone()));
            }
        }
    }
    let results = parallel(config.workers, &evals, |(at, m, cp)| evaluate(m, *at, cp, config, sink));
    let mut evaluations = Vec::new();
    let mut by_point: std::collections::BTreeMap<(ScenarioKind, u32), Vec<Scored>> = Default::default();
    for ((at, m, _), r) in evals.iter().zip(results) {
        let r = r?;
        by_point.entry((m.scenario, *at)).or_default().push(Scored {
            red: r.red_side.points,
            blue: r.blue_side.points,
            sigma_blue: sigmas.get(&(m.scenario, m.blue.clone())).copied().unwrap_or(0.0),
        });
        evaluations.push(r);
    }
    let checkpoints = by_point
        .into_iter()
        .map(|((scenario, checkpoint), scored)| CheckpointPoint {
            scenario,
            checkpoint,
            evaluations: scored.len(),
            metrics: pooled_metrics(&scored, report_scale(scenario)),
        })
        .collect();
    Ok(SelfPlayReport { series, checkpoints, training, evaluations })
}

/// Blue systems a protocol is scored against.
fn protocol_blues(config: &RunConfig, selfplay: bool) -> Vec<(ScenarioKind, SystemSpec)> {
    let mut out = Vec::new();
    for &k in &config.scenarios {
        let blues = if selfplay {
            opponents::names(k).into_iter().map(|n| SystemSpec::Builtin(n.into())).collect()
        } else {
            config.opponents_for(k)
        };
        out.extend(blues.into_iter().map(|b| (k, b)));
    }
    out
}

fn prepare(config: &RunConfig, selfplay: bool, suffix: &str) -> Result<(RunFolder, SigmaMap), BenchError> {
    config.validate()?;
    require_tactics(config)?;
    let folder = RunFolder::create(config, suffix)?;
    let mut table = CalibrationTable::load_or_default(&config.calibration_path())?;
    let sigmas = table.ensure(config, &protocol_blues(config, selfplay))?;
    table.save()?;
    folder.write_json(SIGMA_FILE, &sigma_entries(&sigmas))?;
    Ok((folder, sigmas))
}

/// Runs the adaptation protocol into a fresh run folder.
pub fn run_adaptation(config: &RunConfig) -> Result<(PathBuf, AdaptationReport), BenchError> {
    let (folder, sigmas) = prepare(config, false, "adapt")?;
    let report = adaptation_protocol(config, &sigmas, Some(&folder))?;
    folder.write_json("adaptation.json", &report)?;
    crate::record::write_file(&folder.path().join("adaptation.csv"), report.to_csv().as_bytes())?;
    Ok((folder.path().to_path_buf(), report))
}

/// Runs the self-play protocol into a fresh run folder.
pub fn run_selfplay(config: &RunConfig) -> Result<(PathBuf, SelfPlayReport), BenchError> {
    let (folder, sigmas) = prepare(config, true, "selfplay")?;
    let report = self_play_protocol(config, &sigmas, Some(&folder))?;
    folder.write_json("selfplay.json", &report)?;
    let dir = folder.path();
    crate::record::write_file(&dir.join("selfplay_checkpoints.csv"), report.checkpoints_csv().as_bytes())?;
    crate::record::write_file(&dir.join("selfplay_scores.csv"), report.scores_csv().as_bytes())?;
    Ok((dir.to_path_buf(), report))
}
