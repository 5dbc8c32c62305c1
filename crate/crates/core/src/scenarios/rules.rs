//! Recipes, drops, food points and team scoring.

use std::collections::BTreeMap;

use rand::Rng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::world::{Crop, Team};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub output: String,
    #[serde(default = "one")]
    pub output_count: u32,
    pub inputs: BTreeMap<String, u32>,
    #[serde(default)]
    pub needs_table: bool,
    #[serde(default)]
    pub needs_furnace: bool,
    /// Items handed back after crafting, e.g. empty buckets.
    #[serde(default)]
    pub returns: BTreeMap<String, u32>,
}

fn one() -> u32 {
    1
}

impl Recipe {
    /// Furnace recipes have exactly one input kind; this is it.
    pub fn furnace_input(&self) -> Option<&str> {
        if self.needs_furnace && self.inputs.len() == 1 {
            self.inputs.keys().next().map(String::as_str)
        } else {
            None
        }
    }
}

/// Recipes keyed by output item; crafting and smelting live in one table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RecipeTable {
    recipes: BTreeMap<String, Recipe>,
}

impl RecipeTable {
    pub fn new(recipes: impl IntoIterator<Item = Recipe>) -> Self {
        Self {
            recipes: recipes.into_iter().map(|r| (r.output.clone(), r)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Recipe> {
        self.recipes.values()
    }

    pub fn len(&self) -> usize {
        self.recipes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recipes.is_empty()
    }

    /// Furnace recipe consuming `input`.
    pub fn smelting(&self, input: &str) -> Option<&Recipe> {
        self.recipes.values().find(|r| r.furnace_input() == Some(input))
    }
}

pub fn recipe_lookup<'a>(table: &'a RecipeTable, item: &str) -> Option<&'a Recipe> {
    table.recipes.get(item)
}

/// Inclusive count range for one dropped item.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drop {
    pub item: String,
    pub min: u32,
    pub max: u32,
}

impl Drop {
    pub fn roll(&self, rng: &mut SplitMix64) -> u32 {
        if self.max <= self.min {
            self.min
        } else {
            rng.gen_range(self.min..=self.max)
        }
    }
}

/// Rolls every entry of a drop list, skipping zero counts.
pub fn roll_drops(drops: &[Drop], rng: &mut SplitMix64) -> Vec<(String, u32)> {
    drops
        .iter()
        .map(|d| (d.item.clone(), d.roll(rng)))
        .filter(|(_, n)| *n > 0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CropDrops {
    pub crop: Crop,
    pub drops: Vec<Drop>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobDrops {
    pub mob: String,
    pub drops: Vec<Drop>,
}

/// Points per submitted food item.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FoodPointsTable(pub BTreeMap<String, u32>);

impl FoodPointsTable {
    pub fn points(&self, item: &str) -> Option<u32> {
        self.0.get(item).copied()
    }

    pub fn is_food(&self, item: &str) -> bool {
        self.0.contains_key(item)
    }
}

/// One line of the scoring audit log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreEvent {
    pub tick: u64,
    pub agent: String,
    pub item: String,
    pub count: u32,
    pub points: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamScore {
    pub team: Team,
    pub points: u32,
    /// Food types that lock in points, in first-submission order.
    pub submitted_types: Vec<String>,
    /// `(tick, cumulative points)`, starting at `(0, 0)`; one entry per change.
    pub timeline: Vec<(u64, u32)>,
    pub audit: Vec<ScoreEvent>,
}

impl TeamScore {
    pub fn new(team: Team) -> Self {
        Self {
            team,
            points: 0,
            submitted_types: Vec::new(),
            timeline: vec![(0, 0)],
            audit: Vec::new(),
        }
    }

    fn award(&mut self, tick: u64, agent: &str, item: &str, count: u32, points: u32) -> u32 {
        if points == 0 {
            return 0;
        }
        self.points += points;
        self.audit.push(ScoreEvent {
            tick,
            agent: agent.to_string(),
            item: item.to_string(),
            count,
            points,
        });
        match self.timeline.last_mut() {
            Some(last) if last.0 == tick => last.1 = self.points,
            _ => self.timeline.push((tick, self.points)),
        }
        points
    }

    /// Tick of the first awarded point.
    pub fn first_score_tick(&self) -> Option<u64> {
        self.audit.first().map(|e| e.tick)
    }

    /// Cumulative points at every tick `0..=duration`.
    pub fn dense_timeline(&self, duration: u64) -> Vec<u32> {
        let mut out = Vec::with_capacity(duration as usize + 1);
        let mut idx = 0;
        let mut current = 0;
        for t in 0..=duration {
            while idx < self.timeline.len() && self.timeline[idx].0 <= t {
                current = self.timeline[idx].1;
                idx += 1;
            }
            out.push(current);
        }
        out
    }
}

/// Hand-in scoring with the per-team unique type limit. A type is locked by
/// its first submission while fewer than `max_types` are locked; locked types
/// always score, others never do.
pub fn score_hand_in(
    score: &mut TeamScore,
    item: &str,
    count: u32,
    table: &FoodPointsTable,
    max_types: usize,
    tick: u64,
    agent: &str,
) -> u32 {
    let Some(each) = table.points(item) else { return 0 };
    if count == 0 {
        return 0;
    }
    if !score.submitted_types.iter().any(|t| t == item) {
        if score.submitted_types.len() >= max_types {
            return 0;
        }
        score.submitted_types.push(item.to_string());
    }
    score.award(tick, agent, item, count, count * each)
}

/// Mushrooms score only for the team whose area they grew in.
pub fn score_mushroom(
    score: &mut TeamScore,
    origin_area: Option<Team>,
    item: &str,
    count: u32,
    tick: u64,
    agent: &str,
) -> u32 {
    if origin_area != Some(score.team) {
        return 0;
    }
    score.award(tick, agent, item, count, count)
}
