//! Run configuration: a TOML document, optionally extending a parent file,
//! with `key.path=value` overrides from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use arena_agents::llm::{HttpConfig, MockConfig, DEFAULT_TEMPERATURE};
use arena_agents::TeamSettings;
use arena_core::opponents;
use arena_core::scenarios::ScenarioKind;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("override `{0}` must look like key.path=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown system `{0}` (expected tactics, cot, random, builtin:<name> or a built-in name)")]
    System(String),
    #[error("config `extends` chain is deeper than 8 files")]
    TooDeep,
}

/// Which team system plays a side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemSpec {
    Tactics,
    Cot,
    Random,
    Builtin(String),
}

impl SystemSpec {
    pub fn is_llm(&self) -> bool {
        matches!(self, SystemSpec::Tactics | SystemSpec::Cot)
    }

    /// Short label for file names and reports.
    pub fn label(&self) -> String {
        match self {
            SystemSpec::Builtin(n) => n.clone(),
            other => other.to_string(),
        }
    }

    /// Whether the system can play `kind`.
    pub fn supports(&self, kind: ScenarioKind) -> bool {
        match self {
            SystemSpec::Builtin(n) => opponents::names(kind).contains(&n.as_str()),
            _ => true,
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Tactics => f.write_str("tactics"),
            SystemSpec::Cot => f.write_str("cot"),
            SystemSpec::Random => f.write_str("random"),
            SystemSpec::Builtin(n) => write!(f, "builtin:{n}"),
        }
    }
}

impl FromStr for SystemSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let known = |n: &str| ScenarioKind::ALL.iter().any(|k| opponents::names(*k).contains(&n));
        match s {
            "tactics" => Ok(SystemSpec::Tactics),
            "cot" => Ok(SystemSpec::Cot),
            "random" => Ok(SystemSpec::Random),
            _ => {
                let name = s.strip_prefix("builtin:").unwrap_or(s);
                if known(name) {
                    Ok(SystemSpec::Builtin(name.to_string()))
                } else {
                    Err(ConfigError::System(s.to_string()))
                }
            }
        }
    }
}

impl Serialize for SystemSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientKind {
    #[default]
    Mock,
    Http,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub client: ClientKind,
    pub model: String,
    pub temperature: f32,
    pub mock: MockConfig,
    pub http: HttpConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            client: ClientKind::Mock,
            model: "gpt-4o".into(),
            temperature: DEFAULT_TEMPERATURE,
            mock: MockConfig::default(),
            http: HttpConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelfPlayConfig {
    pub episodes: u32,
    pub checkpoint_every: u32,
}

impl Default for SelfPlayConfig {
    fn default() -> Self {
        Self { episodes: 20, checkpoint_every: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub scenarios: Vec<ScenarioKind>,
    /// Blue-side systems. Empty means every built-in of each scenario.
    pub opponents: Vec<SystemSpec>,
    pub red: SystemSpec,
    /// Consecutive episodes per matchup; the red system persists across them.
    pub episodes: u32,
    /// Independent repeats with fresh systems.
    pub repeats: u32,
    /// One run seed per repeat.
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Parallel matchups; 0 uses every core.
    pub workers: usize,
    /// Store observe events in the per-episode logs as well as chat.
    pub keep_observations: bool,
    /// Calibration cache file; defaults to `<output_dir>/calibration.json`.
    pub calibration_cache: Option<PathBuf>,
    pub model: ModelConfig,
    pub team: TeamSettings,
    pub selfplay: SelfPlayConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "bench".into(),
            scenarios: ScenarioKind::ALL.to_vec(),
            opponents: Vec::new(),
            red: SystemSpec::Tactics,
            episodes: 5,
            repeats: 3,
            seeds: vec![1, 2, 3],
            output_dir: PathBuf::from("runs"),
            workers: 0,
            keep_observations: false,
            calibration_cache: None,
            model: ModelConfig::default(),
            team: TeamSettings::default(),
            selfplay: SelfPlayConfig::default(),
        }
    }
}

impl RunConfig {
    /// Loads `path`, following `extends`, then applies `overrides`.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table = load_table(path, 0)?;
        apply_overrides(&mut table, overrides)?;
        Self::from_table(table, path)
    }

    /// Defaults with `overrides` applied.
    pub fn from_overrides(overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table = Table::new();
        apply_overrides(&mut table, overrides)?;
        Self::from_table(table, Path::new("<defaults>"))
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let table: Table = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<inline>"),
            message: e.to_string(),
        })?;
        Self::from_table(table, Path::new("<inline>"))
    }

    fn from_table(table: Table, path: &Path) -> Result<Self, ConfigError> {
        let config: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if self.episodes < 1 {
            return fail("episodes must be at least 1".into());
        }
        if self.repeats < 1 {
            return fail("repeats must be at least 1".into());
        }
        if self.seeds.len() < self.repeats as usize {
            return fail(format!("{} seeds for {} repeats", self.seeds.len(), self.repeats));
        }
        if self.scenarios.is_empty() {
            return fail("no scenarios".into());
        }
        for s in self.opponents.iter().chain(std::iter::once(&self.red)) {
            if !self.scenarios.iter().any(|k| s.supports(*k)) {
                return fail(format!("{s} plays none of the selected scenarios"));
            }
        }
        if self.selfplay.checkpoint_every == 0 {
            return fail("selfplay.checkpoint_every must be positive".into());
        }
        Ok(())
    }

    /// Blue systems for `kind`, in configuration order.
    pub fn opponents_for(&self, kind: ScenarioKind) -> Vec<SystemSpec> {
        if self.opponents.is_empty() {
            return opponents::names(kind).into_iter().map(|n| SystemSpec::Builtin(n.into())).collect();
        }
        self.opponents.iter().filter(|o| o.supports(kind)).cloned().collect()
    }

    pub fn calibration_path(&self) -> PathBuf {
        self.calibration_cache.clone().unwrap_or_else(|| self.output_dir.join("calibration.json"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn load_table(path: &Path, depth: usize) -> Result<Table, ConfigError> {
    if depth > 8 {
        return Err(ConfigError::TooDeep);
    }
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let mut table: Table = toml::from_str(&text)
        .map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    match table.remove("extends") {
        None => Ok(table),
        Some(Value::String(parent)) => {
            let parent_path = path.parent().unwrap_or(Path::new(".")).join(parent);
            let mut base = load_table(&parent_path, depth + 1)?;
            merge(&mut base, table);
            Ok(base)
        }
        Some(_) => Err(ConfigError::Parse { path: path.to_path_buf(), message: "`extends` must be a path".into() }),
    }
}

/// Deep merge: tables merge key by key, everything else is replaced.
pub fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn apply_overrides(table: &mut Table, overrides: &[String]) -> Result<(), ConfigError> {
    for o in overrides {
        let (key, raw) = o.split_once('=').ok_or_else(|| ConfigError::Override(o.clone()))?;
        let value = toml::from_str::<Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        let mut parts: Vec<&str> = key.trim().split('.').collect();
        let last = parts.pop().filter(|l| !l.is_empty()).ok_or_else(|| ConfigError::Override(o.clone()))?;
        let mut node = &mut *table;
        for p in parts {
            let entry = node.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
            node = entry.as_table_mut().ok_or_else(|| ConfigError::Override(o.clone()))?;
        }
        node.insert(last.to_string(), value);
    }
    Ok(())
}
