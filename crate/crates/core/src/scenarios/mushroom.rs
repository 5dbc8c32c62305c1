//! Mushroom War regrowth bookkeeping.
//!
//! Slime patches always regrow. Mushroom blocks regrow only while their area
//! holds at most `max_slime` counted slime blocks; counted slime is the
//! original patch cells plus slime the opposing team placed in the area.
//! Whenever the count changes the pending mushroom timers are reconciled, so
//! a mushroom timer never coexists with an over-full area.

use rand::Rng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::world::{Block, Delay, Position, Team, TimerEffect, WorldState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MushroomRules {
    #[serde(default = "default_max_slime")]
    pub max_slime: usize,
    /// Largest mushroom yield; yields are uniform over `0..=yield_max`.
    #[serde(default = "default_yield_max")]
    pub yield_max: u32,
    #[serde(default = "default_item")]
    pub item: String,
    pub slime_regrow: Delay,
    pub mushroom_regrow: Delay,
}

fn default_max_slime() -> usize {
    7
}
fn default_yield_max() -> u32 {
    2
}
fn default_item() -> String {
    "red_mushroom".to_string()
}

impl Default for MushroomRules {
    fn default() -> Self {
        Self {
            max_slime: default_max_slime(),
            yield_max: default_yield_max(),
            item: default_item(),
            slime_regrow: Delay::Uniform { lo: 40, hi: 120 },
            mushroom_regrow: Delay::Uniform { lo: 60, hi: 200 },
        }
    }
}

/// Counted slime blocks in `team`'s area.
pub fn slime_count(world: &WorldState, team: Team) -> usize {
    world
        .cells()
        .filter(|(_, c)| {
            c.owner_area == Some(team)
                && c.kind == Block::SlimeBlock
                && (c.home == Some(Block::SlimeBlock) || c.placed_by == Some(team.opponent()))
        })
        .count()
}

/// Every slime block in the area, whoever placed it.
pub fn raw_slime_count(world: &WorldState, team: Team) -> usize {
    world
        .cells()
        .filter(|(_, c)| c.owner_area == Some(team) && c.kind == Block::SlimeBlock)
        .count()
}

pub fn mushroom_regrow_eligible(world: &WorldState, team: Team, rules: &MushroomRules) -> bool {
    slime_count(world, team) <= rules.max_slime
}

/// Pending mushroom regrow timers for cells in `team`'s area.
pub fn pending_mushroom_timers(world: &WorldState, team: Team) -> usize {
    world
        .timers()
        .filter(|(_, ev)| match &ev.effect {
            TimerEffect::RegrowBlock { cell, kind, .. } => {
                *kind == Block::RedMushroomBlock
                    && world.cell(*cell).and_then(|c| c.owner_area) == Some(team)
            }
            _ => false,
        })
        .count()
}

/// Schedules timers for every missing mushroom when the area is eligible,
/// cancels them all when it is not.
pub fn refresh_area(world: &mut WorldState, team: Team, rules: &MushroomRules) {
    if mushroom_regrow_eligible(world, team, rules) {
        let missing: Vec<(Position, u32)> = world
            .cells()
            .filter(|(_, c)| {
                c.owner_area == Some(team)
                    && c.home == Some(Block::RedMushroomBlock)
                    && c.kind == Block::Air
            })
            .map(|(p, c)| (p, c.epoch))
            .collect();
        for (cell, epoch) in missing {
            if !world.pending_regrow(cell) {
                let effect = TimerEffect::RegrowBlock {
                    cell,
                    kind: Block::RedMushroomBlock,
                    epoch,
                };
                world
                    .schedule(effect, &rules.mushroom_regrow)
                    .expect("cell is in bounds");
            }
        }
    } else {
        let owner = |w: &WorldState, p: Position| w.cell(p).and_then(|c| c.owner_area);
        let doomed: Vec<Position> = world
            .timers()
            .filter_map(|(_, ev)| match &ev.effect {
                TimerEffect::RegrowBlock { cell, kind, .. } if *kind == Block::RedMushroomBlock => {
                    Some(*cell)
                }
                _ => None,
            })
            .filter(|p| owner(world, *p) == Some(team))
            .collect();
        if !doomed.is_empty() {
            world.cancel_where(|ev| {
                matches!(&ev.effect, TimerEffect::RegrowBlock { cell, kind, .. }
                    if *kind == Block::RedMushroomBlock && doomed.contains(cell))
            });
        }
    }
}

/// Reacts to a block leaving `cell`: slime patches get a regrow timer, and
/// the area's mushroom timers are reconciled.
pub fn on_block_removed(world: &mut WorldState, cell: Position, removed: Block, rules: &MushroomRules) {
    let Some(c) = world.cell(cell) else { return };
    let (home, epoch, area) = (c.home, c.epoch, c.owner_area);
    if removed == Block::SlimeBlock && home == Some(Block::SlimeBlock) {
        let effect = TimerEffect::RegrowBlock {
            cell,
            kind: Block::SlimeBlock,
            epoch,
        };
        world
            .schedule(effect, &rules.slime_regrow)
            .expect("cell is in bounds");
    }
    if let Some(team) = area {
        refresh_area(world, team, rules);
    }
}

/// Reacts to any block appearing in a cell (placement or regrowth).
pub fn on_block_added(world: &mut WorldState, cell: Position, rules: &MushroomRules) {
    if let Some(team) = world.cell(cell).and_then(|c| c.owner_area) {
        refresh_area(world, team, rules);
    }
}

/// Mushrooms dropped by one broken mushroom block.
pub fn mushroom_yield(rng: &mut SplitMix64, rules: &MushroomRules) -> u32 {
    rng.gen_range(0..=rules.yield_max)
}
