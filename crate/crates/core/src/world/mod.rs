//! Deterministic tick-based simulation kernel.
//!
//! The world is a flat bounded grid of [`BlockCell`]s plus agents, mobs,
//! containers, ground items and an ordered timer queue. All randomness comes
//! from one seeded SplitMix64 generator, drawn in simulation order, so a seed
//! and an identical sequence of calls reproduce the same event stream.

mod event;
mod layout;
mod types;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use event::{
    ChestContents, Event, EventKind, NearbyBlock, NearbyMob, Observation, Payload, SelfStatus,
    ENVIRONMENT,
};
pub use layout::{
    AgentSpec, AnchorSpec, AreaSpec, BlockSpec, ChestSpec, Layout, LayoutError, MobSpec,
    LAYOUT_SCHEMA,
};
pub use types::{
    is_item_id, AgentBody, AgentRole, Block, BlockCell, Crop, Furnace, GroundItem, Inventory, Mob,
    Position, Soil, Team, TICKS_PER_SECOND,
};

/// Default episode length: two minutes.
pub const DEFAULT_DURATION: u64 = 2400;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid timer target: {0}")]
    InvalidTarget(String),
}

/// Random delay, in ticks. Every sample is at least one tick.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Delay {
    /// Uniform integer in `[lo, hi]`.
    Uniform { lo: u64, hi: u64 },
    /// Number of Bernoulli(p) ticks until the first success.
    Geometric { p: f64 },
}

impl Delay {
    pub fn sample(&self, rng: &mut SplitMix64) -> u64 {
        match *self {
            Delay::Uniform { lo, hi } => {
                let (lo, hi) = (lo.min(hi), lo.max(hi));
                rng.gen_range(lo..=hi).max(1)
            }
            Delay::Geometric { p } => {
                if p >= 1.0 {
                    return 1;
                }
                let p = p.max(1e-9);
                // inverse CDF; u in (0, 1]
                let u = 1.0 - rng.gen::<f64>();
                let k = (u.ln() / (1.0 - p).ln()).ceil();
                (k as u64).max(1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "effect", rename_all = "snake_case")]
pub enum TimerEffect {
    RegrowBlock { cell: Position, kind: Block, epoch: u32 },
    CropAdvance { cell: Position, epoch: u32 },
    SmeltComplete { furnace: Position, agent: String, output: String, count: u32 },
    MobRespawn { mob: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledEvent {
    pub fire_tick: u64,
    pub created_tick: u64,
    pub effect: TimerEffect,
}

/// Handle to a queued timer; also its position in the queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimerHandle {
    pub fire_tick: u64,
    pub seq: u64,
}

/// Tunables the kernel needs without knowing the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldRules {
    pub duration: u64,
    pub crop_advance: Delay,
    pub mob_respawn: Delay,
}

impl Default for WorldRules {
    fn default() -> Self {
        Self {
            duration: DEFAULT_DURATION,
            crop_advance: Delay::Geometric { p: 0.05 },
            mob_respawn: Delay::Uniform { lo: 200, hi: 400 },
        }
    }
}

/// Result of advancing one tick.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub events: Vec<Event>,
    /// Timer effects that actually changed the world, in firing order.
    pub fired: Vec<TimerEffect>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub tick: u64,
    pub width: i32,
    pub depth: i32,
    pub rules: WorldRules,
    cells: Vec<BlockCell>,
    pub agents: Vec<AgentBody>,
    pub mobs: Vec<Mob>,
    pub chests: BTreeMap<Position, Inventory>,
    pub furnaces: BTreeMap<Position, Furnace>,
    pub ground_items: Vec<GroundItem>,
    timers: BTreeMap<TimerHandle, ScheduledEvent>,
    next_seq: u64,
    pub rng: SplitMix64,
    pub chat_log: Vec<Event>,
    interacted_chests: BTreeMap<String, BTreeSet<Position>>,
    pub areas: Vec<AreaSpec>,
}

impl WorldState {
    /// Builds tick-0 state from a layout. Crops without an explicit stage
    /// start mature; immature crops get their growth timers immediately.
    pub fn new(layout: &Layout, seed: u64, rules: WorldRules) -> Result<Self, WorldError> {
        layout.validate()?;
        let mut cells = Vec::with_capacity((layout.width * layout.depth) as usize);
        for z in 0..layout.depth {
            for x in 0..layout.width {
                cells.push(BlockCell::empty(layout.area_of(Position::flat(x, z))));
            }
        }
        let mut world = WorldState {
            tick: 0,
            width: layout.width,
            depth: layout.depth,
            rules,
            cells,
            agents: layout
                .agents
                .iter()
                .map(|a| AgentBody::new(&a.name, a.team, a.role, Position::flat(a.x, a.z)))
                .collect(),
            mobs: layout
                .mobs
                .iter()
                .map(|m| Mob {
                    kind: m.kind.clone(),
                    position: Position::flat(m.x, m.z),
                    alive: true,
                })
                .collect(),
            chests: BTreeMap::new(),
            furnaces: BTreeMap::new(),
            ground_items: Vec::new(),
            timers: BTreeMap::new(),
            next_seq: 0,
            rng: SplitMix64::seed_from_u64(seed),
            chat_log: Vec::new(),
            interacted_chests: BTreeMap::new(),
            areas: layout.areas.clone(),
        };
        let mut growing = Vec::new();
        for spec in &layout.blocks {
            let kind = Block::parse(&spec.kind).expect("validated");
            for p in spec.cells() {
                let stage = spec.stage.unwrap_or(kind.max_stage());
                let cell = world.cell_mut(p).expect("validated");
                cell.set_kind(kind, stage);
                if spec.regrow {
                    cell.home = Some(kind);
                }
                if kind == Block::Furnace {
                    world.furnaces.insert(p, Furnace::default());
                }
                if kind.crop().is_some() && stage < kind.max_stage() {
                    growing.push(p);
                }
            }
        }
        for chest in &layout.chests {
            let p = Position::flat(chest.x, chest.z);
            world.cell_mut(p).expect("validated").set_kind(Block::Chest, 0);
            let inv = chest.items.iter().map(|(k, &v)| (k.as_str(), v)).collect();
            world.chests.insert(p, inv);
        }
        for p in growing {
            world.schedule_growth(p);
        }
        Ok(world)
    }

    fn index(&self, p: Position) -> Option<usize> {
        if p.y != 0 || p.x < 0 || p.z < 0 || p.x >= self.width || p.z >= self.depth {
            return None;
        }
        Some((p.z * self.width + p.x) as usize)
    }

    pub fn in_bounds(&self, p: Position) -> bool {
        self.index(p).is_some()
    }

    pub fn cell(&self, p: Position) -> Option<&BlockCell> {
        self.index(p).map(|i| &self.cells[i])
    }

    pub fn cell_mut(&mut self, p: Position) -> Option<&mut BlockCell> {
        self.index(p).map(move |i| &mut self.cells[i])
    }

    /// All cells with their positions, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (Position, &BlockCell)> {
        let w = self.width;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| (Position::flat(i as i32 % w, i as i32 / w), c))
    }

    pub fn area(&self, team: Team) -> Option<&AreaSpec> {
        self.areas.iter().find(|a| a.team == team)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    pub fn agent(&self, name: &str) -> Result<&AgentBody, WorldError> {
        self.agents
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| WorldError::UnknownAgent(name.to_string()))
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.tick as f64 / TICKS_PER_SECOND as f64
    }

    pub fn is_over(&self) -> bool {
        self.tick >= self.rules.duration
    }

    // ------------------------------------------------------------------
    // timers
    // ------------------------------------------------------------------

    fn check_target(&self, effect: &TimerEffect) -> Result<(), WorldError> {
        match effect {
            TimerEffect::RegrowBlock { cell, .. } | TimerEffect::CropAdvance { cell, .. } => {
                if self.in_bounds(*cell) {
                    Ok(())
                } else {
                    Err(WorldError::InvalidTarget(format!("cell {cell} out of bounds")))
                }
            }
            TimerEffect::SmeltComplete { furnace, agent, .. } => {
                if !self.furnaces.contains_key(furnace) {
                    return Err(WorldError::InvalidTarget(format!("no furnace at {furnace}")));
                }
                self.agent(agent).map(|_| ())
            }
            TimerEffect::MobRespawn { mob } => {
                if *mob < self.mobs.len() {
                    Ok(())
                } else {
                    Err(WorldError::InvalidTarget(format!("no mob #{mob}")))
                }
            }
        }
    }

    /// Queues `effect` at `tick + delay.sample()`, drawing from the world rng.
    pub fn schedule(&mut self, effect: TimerEffect, delay: &Delay) -> Result<TimerHandle, WorldError> {
        self.check_target(&effect)?;
        let d = delay.sample(&mut self.rng);
        Ok(self.push_timer(effect, d))
    }

    /// Queues `effect` exactly `delay` ticks from now (at least one).
    pub fn schedule_after(&mut self, effect: TimerEffect, delay: u64) -> Result<TimerHandle, WorldError> {
        self.check_target(&effect)?;
        Ok(self.push_timer(effect, delay))
    }

    fn push_timer(&mut self, effect: TimerEffect, delay: u64) -> TimerHandle {
        let handle = TimerHandle {
            fire_tick: self.tick + delay.max(1),
            seq: self.next_seq,
        };
        self.next_seq += 1;
        self.timers.insert(
            handle,
            ScheduledEvent {
                fire_tick: handle.fire_tick,
                created_tick: self.tick,
                effect,
            },
        );
        handle
    }

    pub fn cancel(&mut self, handle: TimerHandle) -> Option<ScheduledEvent> {
        self.timers.remove(&handle)
    }

    /// Cancels every timer matching `pred`, returning how many were removed.
    pub fn cancel_where(&mut self, mut pred: impl FnMut(&ScheduledEvent) -> bool) -> usize {
        let doomed: Vec<TimerHandle> = self
            .timers
            .iter()
            .filter(|(_, ev)| pred(ev))
            .map(|(h, _)| *h)
            .collect();
        for h in &doomed {
            self.timers.remove(h);
        }
        doomed.len()
    }

    /// Pending timers in firing order (insertion order within a tick).
    pub fn timers(&self) -> impl Iterator<Item = (&TimerHandle, &ScheduledEvent)> {
        self.timers.iter()
    }

    pub fn pending_regrow(&self, cell: Position) -> bool {
        self.timers.values().any(
            |ev| matches!(ev.effect, TimerEffect::RegrowBlock { cell: c, .. } if c == cell),
        )
    }

    /// Schedules the next growth stage for a crop cell, if it is not mature.
    pub fn schedule_growth(&mut self, p: Position) {
        let Some(cell) = self.cell(p) else { return };
        if cell.kind.crop().is_none() || cell.is_mature() {
            return;
        }
        let epoch = cell.epoch;
        let delay = self.rules.crop_advance;
        let _ = self.schedule(TimerEffect::CropAdvance { cell: p, epoch }, &delay);
    }

    /// Puts a crop on `p` at `stage` and starts its growth timer.
    pub fn plant(&mut self, p: Position, crop: Crop, stage: u8) {
        if let Some(cell) = self.cell_mut(p) {
            cell.set_kind(Block::Crop(crop), stage);
        }
        self.schedule_growth(p);
    }

    /// Advances one tick and applies every timer due at the new tick.
    pub fn step_tick(&mut self) -> StepReport {
        self.step_tick_with(|_, _| {})
    }

    /// Like [`step_tick`](Self::step_tick), calling `after` right after each
    /// applied timer so rule code can react before the next one fires.
    pub fn step_tick_with(&mut self, mut after: impl FnMut(&mut WorldState, &TimerEffect)) -> StepReport {
        self.tick += 1;
        let mut report = StepReport::default();
        while let Some(entry) = self.timers.first_entry() {
            if entry.key().fire_tick > self.tick {
                break;
            }
            let ev = entry.remove();
            if self.apply_timer(&ev.effect, &mut report.events) {
                after(self, &ev.effect);
                report.fired.push(ev.effect);
            }
        }
        self.chat_log.extend(report.events.iter().cloned());
        report
    }

    fn apply_timer(&mut self, effect: &TimerEffect, events: &mut Vec<Event>) -> bool {
        match effect {
            TimerEffect::RegrowBlock { cell, kind, epoch } => {
                let Some(c) = self.cell_mut(*cell) else { return false };
                if c.kind != Block::Air || c.epoch != *epoch {
                    return false;
                }
                c.set_kind(*kind, kind.max_stage());
                true
            }
            TimerEffect::CropAdvance { cell, epoch } => {
                let Some(c) = self.cell_mut(*cell) else { return false };
                if c.epoch != *epoch || c.kind.crop().is_none() || c.is_mature() {
                    return false;
                }
                c.growth_stage += 1;
                self.schedule_growth(*cell);
                true
            }
            TimerEffect::SmeltComplete { agent, output, count, .. } => {
                let tick = self.tick;
                let Some(i) = self.agent_index(agent) else { return false };
                self.agents[i].inventory.add(output, *count);
                events.push(Event::chat(tick, agent, format!("Smelted {count} {output}")));
                true
            }
            TimerEffect::MobRespawn { mob } => {
                let Some(m) = self.mobs.get_mut(*mob) else { return false };
                m.alive = true;
                true
            }
        }
    }

    // ------------------------------------------------------------------
    // items
    // ------------------------------------------------------------------

    pub fn drop_items(&mut self, position: Position, item: &str, count: u32, origin_area: Option<Team>) {
        if count == 0 {
            return;
        }
        self.ground_items.push(GroundItem {
            position,
            item: item.to_string(),
            count,
            origin_area,
        });
    }

    /// Moves every ground stack within one cell of the agent into its inventory.
    pub fn pickup_near(&mut self, agent: usize) -> Vec<GroundItem> {
        let pos = self.agents[agent].position;
        let (picked, kept): (Vec<_>, Vec<_>) = std::mem::take(&mut self.ground_items)
            .into_iter()
            .partition(|g| g.position.chebyshev(pos) <= 1);
        self.ground_items = kept;
        for g in &picked {
            self.agents[agent].inventory.add(&g.item, g.count);
        }
        picked
    }

    pub fn mark_chest_interaction(&mut self, agent: &str, chest: Position) {
        self.interacted_chests
            .entry(agent.to_string())
            .or_default()
            .insert(chest);
    }

    pub fn push_chat(&mut self, sender: &str, text: impl Into<String>) -> Event {
        let ev = Event::chat(self.tick, sender, text);
        self.chat_log.push(ev.clone());
        ev
    }

    // ------------------------------------------------------------------
    // observation
    // ------------------------------------------------------------------

    /// Snapshot of what `agent` can see within `radius` cells. Pure.
    pub fn observe(&self, agent: &str, radius: u32) -> Result<Observation, WorldError> {
        let body = self.agent(agent)?;
        let pos = body.position;
        let r = radius as i32;
        let mut nearby_blocks = Vec::new();
        for z in (pos.z - r).max(0)..=(pos.z + r).min(self.depth - 1) {
            for x in (pos.x - r).max(0)..=(pos.x + r).min(self.width - 1) {
                let p = Position::flat(x, z);
                let cell = &self.cells[self.index(p).unwrap()];
                if cell.kind != Block::Air {
                    nearby_blocks.push(NearbyBlock {
                        kind: cell.kind.id().to_string(),
                        position: p,
                    });
                }
            }
        }
        let nearby_mobs = self
            .mobs
            .iter()
            .filter(|m| m.alive && m.position.chebyshev(pos) <= u64::from(radius))
            .map(|m| NearbyMob {
                kind: m.kind.clone(),
                distance: m.position.euclidean(pos),
            })
            .collect();
        let chest_contents = self
            .interacted_chests
            .get(agent)
            .into_iter()
            .flatten()
            .filter_map(|p| {
                self.chests.get(p).map(|items| ChestContents {
                    position: *p,
                    items: items.clone(),
                })
            })
            .collect();
        Ok(Observation {
            nearby_blocks,
            nearby_mobs,
            chest_contents,
            inventory: body.inventory.clone(),
            self_status: SelfStatus {
                health: body.health,
                hunger: body.hunger,
                position: pos,
                velocity: [0.0; 3],
                direction: "north".to_string(),
                equipment: body.equipment.clone(),
                biome: "plains".to_string(),
                time: 6000 + self.tick,
                inventory_used: body.inventory.slots_used(),
                elapsed_seconds: self.elapsed_seconds(),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> Layout {
        Layout::from_toml(
            r#"
schema = 1
name = "t"
width = 12
depth = 6

[[areas]]
team = "red"
x = [0, 4]
z = [0, 5]

[[areas]]
team = "blue"
x = [7, 11]
z = [0, 5]

[[blocks]]
kind = "slime_block"
x = 1
z = 1
w = 2
regrow = true

[[blocks]]
kind = "furnace"
x = 5
z = 5

[[agents]]
name = "Ryn"
team = "red"
x = 1
z = 2

[[agents]]
name = "Byte"
team = "blue"
x = 9
z = 2

[[mobs]]
kind = "cow"
x = 10
z = 5
"#,
        )
        .unwrap()
    }

    fn world(seed: u64) -> WorldState {
        WorldState::new(&layout(), seed, WorldRules::default()).unwrap()
    }

    #[test]
    fn new_world_starts_clean() {
        let w = world(7);
        assert_eq!(w.tick, 0);
        assert!(w.chat_log.is_empty());
        assert_eq!(w.agents[0].position, Position::flat(1, 2));
        assert_eq!(w.cell(Position::flat(2, 1)).unwrap().kind, Block::SlimeBlock);
        assert_eq!(world(7), world(7));
    }

    #[test]
    fn timer_fires_on_its_tick() {
        let mut w = world(1);
        let c = Position::flat(1, 1);
        w.cell_mut(c).unwrap().set_kind(Block::Air, 0);
        w.tick = 99;
        let epoch = w.cell(c).unwrap().epoch;
        w.schedule_after(TimerEffect::RegrowBlock { cell: c, kind: Block::SlimeBlock, epoch }, 1)
            .unwrap();
        let report = w.step_tick();
        assert_eq!(w.tick, 100);
        assert_eq!(report.fired.len(), 1);
        assert_eq!(w.cell(c).unwrap().kind, Block::SlimeBlock);
    }

    #[test]
    fn step_without_timers_only_moves_tick() {
        let mut w = world(1);
        let mut before = w.clone();
        w.step_tick();
        before.tick += 1;
        assert_eq!(w, before);
    }

    #[test]
    fn degenerate_delay_is_exact() {
        let mut w = world(3);
        w.tick = 10;
        let h = w
            .schedule(TimerEffect::MobRespawn { mob: 0 }, &Delay::Uniform { lo: 5, hi: 5 })
            .unwrap();
        assert_eq!(h.fire_tick, 15);
    }

    #[test]
    fn schedule_rejects_bad_targets() {
        let mut w = world(3);
        let bad_cell = TimerEffect::CropAdvance { cell: Position::flat(50, 0), epoch: 0 };
        assert!(matches!(
            w.schedule(bad_cell, &Delay::Uniform { lo: 1, hi: 2 }),
            Err(WorldError::InvalidTarget(_))
        ));
        assert!(w.schedule(TimerEffect::MobRespawn { mob: 4 }, &Delay::Uniform { lo: 1, hi: 2 }).is_err());
    }

    #[test]
    fn same_seed_same_fire_ticks() {
        let draw = |seed| {
            let mut w = world(seed);
            (0..20)
                .map(|_| {
                    w.schedule(TimerEffect::MobRespawn { mob: 0 }, &Delay::Uniform { lo: 40, hi: 120 })
                        .unwrap()
                        .fire_tick
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn observe_lists_blocks_and_elapsed_time() {
        let mut w = world(1);
        let obs = w.observe("Ryn", 8).unwrap();
        let slimes: Vec<_> = obs.nearby_blocks.iter().filter(|b| b.kind == "slime_block").collect();
        assert_eq!(slimes.len(), 2);
        assert!(obs.nearby_mobs.is_empty());
        w.tick = 600;
        assert_eq!(w.observe("Ryn", 8).unwrap().self_status.elapsed_seconds, 30.0);
        assert_eq!(w.observe("Nobody", 8), Err(WorldError::UnknownAgent("Nobody".into())));
    }

    #[test]
    fn observe_reports_mob_distances() {
        let w = world(1);
        let obs = w.observe("Byte", 8).unwrap();
        assert_eq!(obs.nearby_mobs.len(), 1);
        assert!((obs.nearby_mobs[0].distance - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pickup_moves_ground_items_within_one_cell() {
        let mut w = world(1);
        w.drop_items(Position::flat(2, 2), "red_mushroom", 2, Some(Team::Red));
        w.drop_items(Position::flat(4, 4), "red_mushroom", 1, Some(Team::Red));
        let picked = w.pickup_near(0);
        assert_eq!(picked.len(), 1);
        assert_eq!(w.agents[0].inventory.count("red_mushroom"), 2);
        assert_eq!(w.ground_items.len(), 1);
    }

    #[test]
    fn geometric_delay_mean() {
        let mut rng = SplitMix64::seed_from_u64(5);
        let d = Delay::Geometric { p: 0.05 };
        let n = 20_000;
        let mean = (0..n).map(|_| d.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 20.0).abs() < 0.6, "mean {mean}");
    }
}
