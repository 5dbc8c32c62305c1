//! Per-episode records and the run folder they are written to.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use arena_core::game::{EpisodeResult, EpisodeSide, Winner};
use arena_core::scenarios::ScenarioKind;
use arena_core::team::LlmCallRecord;
use arena_core::world::Team;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SystemSpec};
use crate::error::BenchError;

/// Timing of one model call, without the text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallStat {
    pub purpose: String,
    pub agent: Option<String>,
    pub t_resp: f64,
    pub n_out: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideRecord {
    pub system: String,
    pub points: u32,
    pub submitted_types: Vec<String>,
    pub timeline: Vec<(u64, u32)>,
    pub calls: Vec<CallStat>,
    pub iterations: Vec<(String, u32)>,
    pub runtime_errors: u32,
}

impl SideRecord {
    fn from_side(side: &EpisodeSide) -> Self {
        Self {
            system: side.system.clone(),
            points: side.score.points,
            submitted_types: side.score.submitted_types.clone(),
            timeline: side.score.timeline.clone(),
            calls: side
                .llm_calls
                .iter()
                .map(|c| CallStat { purpose: c.purpose.clone(), agent: c.agent.clone(), t_resp: c.t_resp, n_out: c.n_out })
                .collect(),
            iterations: side.iterations.clone(),
            runtime_errors: side.runtime_errors,
        }
    }

    /// Points held at `tick`.
    pub fn points_at(&self, tick: u64) -> u32 {
        let i = self.timeline.partition_point(|(t, _)| *t <= tick);
        if i == 0 {
            0
        } else {
            self.timeline[i - 1].1
        }
    }

    pub fn first_score_tick(&self) -> Option<u64> {
        self.timeline.iter().find(|(_, p)| *p > 0).map(|(t, _)| *t)
    }
}

/// Where an episode sits in a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeKey {
    pub scenario: ScenarioKind,
    pub red: SystemSpec,
    pub blue: SystemSpec,
    pub repeat: u32,
    pub episode: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

/// The compact, self-contained result of one episode, as stored in `scores.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    /// Path of the episode folder below `episodes/`, e.g. `mushroom_war/tactics_vs_passive/r0/e3`.
    pub id: String,
    #[serde(flatten)]
    pub key: EpisodeKey,
    pub run_seed: u64,
    pub seed: u64,
    pub duration: u64,
    pub winner: Winner,
    pub red_side: SideRecord,
    pub blue_side: SideRecord,
}

impl EpisodeRecord {
    pub fn new(id: String, key: EpisodeKey, run_seed: u64, result: &EpisodeResult) -> Self {
        Self {
            id,
            key,
            run_seed,
            seed: result.seed,
            duration: result.duration,
            winner: result.winner,
            red_side: SideRecord::from_side(&result.red),
            blue_side: SideRecord::from_side(&result.blue),
        }
    }

    pub fn side(&self, team: Team) -> &SideRecord {
        match team {
            Team::Red => &self.red_side,
            Team::Blue => &self.blue_side,
        }
    }

    pub fn points(&self) -> (u32, u32) {
        (self.red_side.points, self.blue_side.points)
    }

    /// Ordering used by exports: scenario, red, blue, stage, repeat, episode, id.
    pub fn sort_key(&self) -> (ScenarioKind, String, String, Option<&str>, u32, u32, &str) {
        let k = &self.key;
        (k.scenario, k.red.to_string(), k.blue.to_string(), k.stage.as_deref(), k.repeat, k.episode, &self.id)
    }
}

/// One line of `transcripts.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub team: Team,
    #[serde(flatten)]
    pub call: LlmCallRecord,
}

pub const CONFIG_FILE: &str = "config.toml";
pub const SCORES_FILE: &str = "scores.jsonl";
pub const SIGMA_FILE: &str = "sigma.json";
pub const FAILURES_FILE: &str = "failures.json";

/// A unique output folder for one invocation.
pub struct RunFolder {
    root: PathBuf,
    scores: Mutex<BufWriter<File>>,
}

impl RunFolder {
    /// Creates `<output_dir>/<name>-<timestamp>`, adding `-2`, `-3`, ... when taken.
    pub fn create(config: &RunConfig, suffix: &str) -> Result<Self, BenchError> {
        let out = &config.output_dir;
        fs::create_dir_all(out).map_err(BenchError::io(out))?;
        let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S");
        let base = if suffix.is_empty() {
            format!("{}-{stamp}", config.name)
        } else {
            format!("{}-{suffix}-{stamp}", config.name)
        };
        let mut n = 1;
        let root = loop {
            let candidate = if n == 1 { out.join(&base) } else { out.join(format!("{base}-{n}")) };
            match fs::create_dir(&candidate) {
                Ok(()) => break candidate,
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => n += 1,
                Err(e) => return Err(BenchError::io(candidate)(e)),
            }
        };
        write_file(&root.join(CONFIG_FILE), config.to_toml().as_bytes())?;
        let path = root.join(SCORES_FILE);
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(BenchError::io(&path))?;
        Ok(Self { root, scores: Mutex::new(BufWriter::new(file)) })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Writes the episode folder and appends the record to `scores.jsonl`,
    /// flushing so an interrupted run keeps everything finished so far.
    pub fn write_episode(&self, record: &EpisodeRecord, result: &EpisodeResult) -> Result<(), BenchError> {
        let dir = self.root.join("episodes").join(&record.id);
        fs::create_dir_all(&dir).map_err(BenchError::io(&dir))?;
        write_jsonl(&dir.join("events.jsonl"), &result.events)?;
        let json = serde_json::to_string_pretty(record).expect("records serialize");
        write_file(&dir.join("result.json"), json.as_bytes())?;
        let transcript: Vec<TranscriptLine> = [(Team::Red, &result.red), (Team::Blue, &result.blue)]
            .into_iter()
            .flat_map(|(team, side)| side.llm_calls.iter().map(move |c| TranscriptLine { team, call: c.clone() }))
            .collect();
        if !transcript.is_empty() {
            write_jsonl(&dir.join("transcripts.jsonl"), &transcript)?;
        }
        let line = serde_json::to_string(record).expect("records serialize");
        let path = self.root.join(SCORES_FILE);
        let mut w = self.scores.lock().unwrap_or_else(|e| e.into_inner());
        writeln!(w, "{line}").and_then(|_| w.flush()).map_err(BenchError::io(path))
    }

    pub fn write_json<T: Serialize>(&self, file: &str, value: &T) -> Result<PathBuf, BenchError> {
        let path = self.root.join(file);
        let json = serde_json::to_string_pretty(value).expect("reports serialize");
        write_file(&path, json.as_bytes())?;
        Ok(path)
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), BenchError> {
    fs::write(path, bytes).map_err(BenchError::io(path))
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), BenchError> {
    let file = File::create(path).map_err(BenchError::io(path))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(BenchError::json(path))?;
        w.write_all(b"\n").map_err(BenchError::io(path))?;
    }
    w.flush().map_err(BenchError::io(path))
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, BenchError> {
    let file = File::open(path).map_err(BenchError::io(path))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(BenchError::io(path))?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line).map_err(BenchError::json(path))?);
        }
    }
    Ok(out)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, BenchError> {
    let text = fs::read_to_string(path).map_err(BenchError::io(path))?;
    serde_json::from_str(&text).map_err(BenchError::json(path))
}
