//! Scenario rulebooks: layouts, regrowth, recipes, points and scoring.
//!
//! Each scenario is a pair of TOML documents: a layout (see
//! [`Layout`](crate::world::Layout)) and a config holding durations, action
//! costs, delay distributions, recipes, drop tables and food points. Both
//! built-in scenarios ship as assets and load with [`Scenario::builtin`].

mod farming;
mod mushroom;
mod rules;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actionlang::PrimitiveTable;
use crate::world::{Delay, Layout, LayoutError, Position, Team, WorldRules, DEFAULT_DURATION};

pub use farming::{
    conversion_needs_hoe, crop_drops, nearest_patch, patches, sabotage_transform, soil_block,
};
pub use mushroom::{
    mushroom_regrow_eligible, mushroom_yield, on_block_added, on_block_removed,
    pending_mushroom_timers, raw_slime_count, refresh_area, slime_count, MushroomRules,
};
pub use rules::{
    recipe_lookup, roll_drops, score_hand_in, score_mushroom, CropDrops, Drop, FoodPointsTable,
    MobDrops, Recipe, RecipeTable, ScoreEvent, TeamScore,
};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    MushroomWar,
    DashAndDine,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 2] = [ScenarioKind::MushroomWar, ScenarioKind::DashAndDine];

    pub fn id(self) -> &'static str {
        match self {
            ScenarioKind::MushroomWar => "mushroom_war",
            ScenarioKind::DashAndDine => "dash_and_dine",
        }
    }

    /// Short label used in reports.
    pub fn short(self) -> &'static str {
        match self {
            ScenarioKind::MushroomWar => "MW",
            ScenarioKind::DashAndDine => "DD",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mushroom_war" | "mw" => Ok(ScenarioKind::MushroomWar),
            "dash_and_dine" | "dd" => Ok(ScenarioKind::DashAndDine),
            other => Err(ScenarioError::Unknown(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    Unknown(String),
    #[error("scenario config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("scenario config schema {found}, expected {expected}")]
    Schema { found: u32, expected: u32 },
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("invalid scenario config: {0}")]
    Invalid(String),
}

/// Ticks charged per primitive step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionCosts {
    pub mine: u64,
    pub craft: u64,
    pub place: u64,
    pub give: u64,
    pub chest: u64,
    pub kill: u64,
    pub farm: u64,
    /// Loading a furnace; the items themselves take `smelt` each.
    pub furnace_load: u64,
    pub smelt: u64,
    pub milk: u64,
}

impl Default for ActionCosts {
    fn default() -> Self {
        Self {
            mine: 20,
            craft: 10,
            place: 10,
            give: 5,
            chest: 10,
            kill: 40,
            farm: 15,
            furnace_load: 10,
            smelt: 200,
            milk: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub kind: ScenarioKind,
    pub title: String,
    #[serde(default = "default_duration")]
    pub duration_ticks: u64,
    /// Read but not used to delay observations; kept for config fidelity.
    #[serde(default = "default_wait_ticks")]
    pub wait_ticks: u64,
    /// Raw points are multiplied by this before metrics aggregate them.
    pub report_scale: f64,
    /// How far primitives look for targets.
    pub search_radius: u32,
    /// Radius of observation snapshots.
    pub observe_radius: u32,
    pub primitives: Vec<String>,
    pub description: String,
    pub objective: String,
    #[serde(default = "default_crop_advance")]
    pub crop_advance: Delay,
    #[serde(default = "default_mob_respawn")]
    pub mob_respawn: Delay,
    #[serde(default)]
    pub costs: ActionCosts,
    #[serde(default)]
    pub mushroom: Option<MushroomRules>,
    /// Distinct food types a team can score with; absent means no hand-ins.
    #[serde(default)]
    pub max_food_types: Option<usize>,
    #[serde(default)]
    pub points: FoodPointsTable,
    #[serde(default)]
    pub recipes: Vec<Recipe>,
    #[serde(default)]
    pub harvest: Vec<CropDrops>,
    #[serde(default)]
    pub mob_drops: Vec<MobDrops>,
}

fn default_duration() -> u64 {
    DEFAULT_DURATION
}
fn default_wait_ticks() -> u64 {
    80
}
fn default_crop_advance() -> Delay {
    Delay::Geometric { p: 0.05 }
}
fn default_mob_respawn() -> Delay {
    Delay::Uniform { lo: 200, hi: 400 }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |m: String| Err(ScenarioError::Invalid(m));
        if self.schema != CONFIG_SCHEMA {
            return Err(ScenarioError::Schema {
                found: self.schema,
                expected: CONFIG_SCHEMA,
            });
        }
        if self.duration_ticks == 0 {
            return invalid("duration_ticks must be positive".into());
        }
        if !(self.report_scale > 0.0) {
            return invalid("report_scale must be positive".into());
        }
        for r in &self.recipes {
            if r.inputs.is_empty() {
                return invalid(format!("recipe `{}` has no inputs", r.output));
            }
            if r.needs_furnace && r.inputs.len() != 1 {
                return invalid(format!("furnace recipe `{}` needs exactly one input kind", r.output));
            }
        }
        for (item, &p) in &self.points.0 {
            if p == 0 {
                return invalid(format!("food `{item}` must be worth at least one point"));
            }
        }
        if let Some(name) = self
            .primitives
            .iter()
            .find(|n| crate::actionlang::spec(n).is_none())
        {
            return invalid(format!("unknown primitive `{name}`"));
        }
        Ok(())
    }

    pub fn world_rules(&self) -> WorldRules {
        WorldRules {
            duration: self.duration_ticks,
            crop_advance: self.crop_advance,
            mob_respawn: self.mob_respawn,
        }
    }
}

/// A loaded scenario: config, layout and derived tables.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub layout: Layout,
    pub primitives: PrimitiveTable,
    pub recipes: RecipeTable,
}

const MW_CONFIG: &str = include_str!("../../assets/scenarios/mushroom_war.toml");
const MW_LAYOUT: &str = include_str!("../../assets/layouts/mushroom_war.toml");
const DD_CONFIG: &str = include_str!("../../assets/scenarios/dash_and_dine.toml");
const DD_LAYOUT: &str = include_str!("../../assets/layouts/dash_and_dine.toml");

impl Scenario {
    pub fn from_toml(config: &str, layout: &str) -> Result<Self, ScenarioError> {
        let config = ScenarioConfig::from_toml(config)?;
        let layout = Layout::from_toml(layout)?;
        Self::new(config, layout)
    }

    pub fn new(config: ScenarioConfig, layout: Layout) -> Result<Self, ScenarioError> {
        config.validate()?;
        layout.validate()?;
        Ok(Self {
            primitives: PrimitiveTable::with(&config.primitives),
            recipes: RecipeTable::new(config.recipes.iter().cloned()),
            config,
            layout,
        })
    }

    pub fn builtin(kind: ScenarioKind) -> Self {
        let (cfg, layout) = Self::builtin_sources(kind);
        let s = Self::from_toml(cfg, layout).expect("bundled scenario assets are valid");
        debug_assert_eq!(s.kind(), kind);
        s
    }

    /// The bundled `(config, layout)` TOML texts.
    pub fn builtin_sources(kind: ScenarioKind) -> (&'static str, &'static str) {
        match kind {
            ScenarioKind::MushroomWar => (MW_CONFIG, MW_LAYOUT),
            ScenarioKind::DashAndDine => (DD_CONFIG, DD_LAYOUT),
        }
    }

    pub fn kind(&self) -> ScenarioKind {
        self.config.kind
    }

    pub fn name(&self) -> &'static str {
        self.config.kind.id()
    }

    pub fn duration(&self) -> u64 {
        self.config.duration_ticks
    }

    /// Player agents of `team` in layout order (servers excluded).
    pub fn players(&self, team: Team) -> Vec<String> {
        self.layout
            .agents
            .iter()
            .filter(|a| a.team == team && a.role == crate::world::AgentRole::Player)
            .map(|a| a.name.clone())
            .collect()
    }

    pub fn server(&self, team: Team) -> Option<String> {
        self.layout
            .agents
            .iter()
            .find(|a| a.team == team && a.role == crate::world::AgentRole::Server)
            .map(|a| a.name.clone())
    }

    /// Public layout constants for script templates: `own.<anchor>` and
    /// `opp.<anchor>` rendered as `x, y, z`, plus `server`, `opp_server`,
    /// `team` and `opp_team`.
    pub fn constants(&self, team: Team) -> BTreeMap<String, String> {
        let fmt_pos = |p: Position| format!("{}, {}, {}", p.x, p.y, p.z);
        let mut out = BTreeMap::new();
        for a in &self.layout.anchors {
            let prefix = if a.team == team { "own" } else { "opp" };
            out.insert(format!("{prefix}.{}", a.name), fmt_pos(Position::flat(a.x, a.z)));
        }
        if let Some(s) = self.server(team) {
            out.insert("server".into(), s);
        }
        if let Some(s) = self.server(team.opponent()) {
            out.insert("opp_server".into(), s);
        }
        out.insert("team".into(), team.name().into());
        out.insert("opp_team".into(), team.opponent().name().into());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for kind in ScenarioKind::ALL {
            let s = Scenario::builtin(kind);
            assert_eq!(s.kind(), kind);
            assert_eq!(s.duration(), 2400);
            assert_eq!(s.config.wait_ticks, 80);
            assert_eq!(s.players(Team::Red).len(), 2);
            assert_eq!(s.players(Team::Blue).len(), 2);
        }
    }

    #[test]
    fn report_scales() {
        assert_eq!(Scenario::builtin(ScenarioKind::MushroomWar).config.report_scale, 1.0);
        assert_eq!(Scenario::builtin(ScenarioKind::DashAndDine).config.report_scale, 0.1);
    }

    #[test]
    fn availability_matches_tables() {
        assert_eq!(
            Scenario::builtin(ScenarioKind::MushroomWar).primitives,
            PrimitiveTable::mushroom_war()
        );
        assert_eq!(
            Scenario::builtin(ScenarioKind::DashAndDine).primitives,
            PrimitiveTable::dash_and_dine()
        );
    }

    #[test]
    fn recipe_examples() {
        let s = Scenario::builtin(ScenarioKind::DashAndDine);
        let pie = recipe_lookup(&s.recipes, "pumpkin_pie").unwrap();
        let keys: Vec<&str> = pie.inputs.keys().map(String::as_str).collect();
        assert_eq!(keys, ["egg", "pumpkin", "sugar"]);
        assert!(pie.inputs.values().all(|&n| n == 1));
        let cake = recipe_lookup(&s.recipes, "cake").unwrap();
        for k in ["milk_bucket", "sugar", "wheat", "egg"] {
            assert!(cake.inputs.contains_key(k), "{k}");
        }
        assert_eq!(cake.returns.get("bucket"), Some(&3));
        let soup = recipe_lookup(&s.recipes, "beetroot_soup").unwrap();
        assert!(soup.inputs.contains_key("beetroot") && soup.inputs.contains_key("bowl"));
        assert!(recipe_lookup(&s.recipes, "diamond").is_none());
        assert_eq!(s.recipes.smelting("potato").unwrap().output, "baked_potato");
    }

    #[test]
    fn bad_schema_rejected() {
        let (cfg, layout) = Scenario::builtin_sources(ScenarioKind::MushroomWar);
        let bad = cfg.replacen("schema = 1", "schema = 9", 1);
        assert!(matches!(
            Scenario::from_toml(&bad, layout),
            Err(ScenarioError::Schema { found: 9, .. })
        ));
    }
}
