//! Control-primitive semantics.

use crate::actionlang::{check_call, Call};
use crate::scenarios::{
    conversion_needs_hoe, crop_drops, mushroom_yield, nearest_patch, on_block_added,
    on_block_removed, recipe_lookup, roll_drops, sabotage_transform, score_hand_in, soil_block,
    Recipe,
};
use crate::world::{AgentRole, Block, Crop, Inventory, Position, TimerEffect};

use super::Game;

/// Zero-time steps (say, signals, control flow) an agent may take per tick.
pub const MAX_INSTANT_PER_TICK: u32 = 64;

/// Timeout for `waitSignal` calls that give none.
const DEFAULT_SIGNAL_TIMEOUT: u64 = 600;

#[derive(Clone, Debug)]
pub(super) enum Progress {
    Pending,
    Done { ok: bool, text: String },
}

fn done(text: impl Into<String>) -> Progress {
    Progress::Done {
        ok: true,
        text: text.into(),
    }
}

fn fail(text: impl Into<String>) -> Progress {
    Progress::Done {
        ok: false,
        text: text.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FarmMode {
    Plant,
    Harvest,
    Destroy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ChestMode {
    Get,
    Deposit,
    Check,
}

#[derive(Clone, Debug)]
enum Op {
    /// Feedback-only failure reported on the first run.
    Fail(String),
    Mine {
        name: String,
        max: u32,
        mined: u32,
        target: Option<(Position, u32)>,
    },
    Craft {
        item: String,
        count: u32,
        started: bool,
    },
    Place {
        item: String,
        at: Position,
        started: bool,
    },
    Smelt {
        input: String,
        count: u32,
        furnace: Option<Position>,
        queued: u32,
    },
    Farm {
        mode: FarmMode,
        crop: Crop,
        cells: Vec<Position>,
        next: usize,
        done: u32,
    },
    Kill {
        kind: String,
        timeout: u64,
        deadline: u64,
        target: Option<usize>,
    },
    Give {
        item: String,
        to: usize,
        count: Option<u32>,
        started: bool,
    },
    Chest {
        mode: ChestMode,
        at: Position,
        item: String,
        count: Option<u32>,
        started: bool,
    },
    Move {
        to: Position,
        started: bool,
    },
    Milk {
        target: Option<usize>,
    },
    Convert {
        from: Crop,
        to: Crop,
        started: bool,
    },
    Send {
        to: usize,
    },
    WaitSignal {
        from: Option<usize>,
        deadline: u64,
    },
}

/// One primitive in flight.
#[derive(Clone, Debug)]
pub(super) struct Task {
    op: Op,
    pub(super) started: u64,
    pub(super) ready_at: u64,
    /// Where the agent stands once `ready_at` is reached.
    dest: Option<Position>,
    /// Zero-time primitives are not charged the minimum tick.
    pub(super) instant: bool,
}

/// Cell next to `to` on the way from `from` (or `from` if already adjacent).
pub(super) fn approach(from: Position, to: Position) -> Position {
    if from.chebyshev(to) <= 1 {
        return from;
    }
    Position::new(
        to.x - (to.x - from.x).signum(),
        from.y,
        to.z - (to.z - from.z).signum(),
    )
}

/// Negative or missing counts mean "all".
fn amount(v: Option<i64>) -> Option<u32> {
    match v {
        Some(n) if n >= 0 => Some(n.min(i64::from(u32::MAX)) as u32),
        _ => None,
    }
}

fn clamp_count(v: Option<i64>, default: i64) -> u32 {
    v.unwrap_or(default).clamp(0, 1 << 16) as u32
}

fn missing(recipe: &Recipe, inv: &Inventory, crafts: u32) -> String {
    recipe
        .inputs
        .iter()
        .filter_map(|(item, &need)| {
            let need = need * crafts.max(1);
            let have = inv.count(item);
            (have < need).then(|| format!("{} more {item}", need - have))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn craftable(recipe: &Recipe, inv: &Inventory, wanted: u32) -> u32 {
    recipe
        .inputs
        .iter()
        .map(|(item, &need)| inv.count(item) / need.max(1))
        .min()
        .unwrap_or(0)
        .min(wanted)
}

fn coords(call: &Call, first: usize) -> Position {
    let c = |k| call.int_arg(first + k).unwrap_or(0).clamp(-(1 << 20), 1 << 20) as i32;
    Position::new(c(0), c(1), c(2))
}

impl Game {
    fn radius(&self) -> u32 {
        self.scenario.config.search_radius
    }

    fn pos(&self, i: usize) -> Position {
        self.world.agents[i].position
    }

    /// Nearest cell within the search radius passing `pred`; ties go to scan order.
    fn nearest_cell(&self, i: usize, pred: impl Fn(Position) -> bool) -> Option<Position> {
        let from = self.pos(i);
        let r = self.radius() as i32;
        let mut best: Option<(u64, Position)> = None;
        for z in (from.z - r).max(0)..=(from.z + r).min(self.world.depth - 1) {
            for x in (from.x - r).max(0)..=(from.x + r).min(self.world.width - 1) {
                let p = Position::flat(x, z);
                if !pred(p) {
                    continue;
                }
                let d = from.chebyshev(p);
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p)
    }

    fn nearest_mob(&self, i: usize, kind: &str) -> Option<usize> {
        let from = self.pos(i);
        self.world
            .mobs
            .iter()
            .enumerate()
            .filter(|(_, m)| m.alive && m.kind == kind)
            .map(|(k, m)| (m.position.chebyshev(from), k))
            .filter(|(d, _)| *d <= u64::from(self.radius()))
            .min()
            .map(|(_, k)| k)
    }

    fn is_teammate(&self, i: usize, j: usize) -> bool {
        i != j
            && self.world.agents[j].team == self.world.agents[i].team
            && self.world.agents[j].role == AgentRole::Player
    }

    /// Sets up a primitive. `Err` is a runtime error that stops the program.
    pub(super) fn start_task(&mut self, i: usize, call: Call) -> Result<Task, String> {
        if let Some(issue) = check_call(&call, &self.scenario.primitives).into_iter().next() {
            return Err(issue.to_string());
        }
        let now = self.world.tick;
        let s = |k: usize| call.str_arg(k).unwrap_or_default().to_string();
        let op = match call.name.as_str() {
            "mineBlock" => Op::Mine {
                name: s(0),
                max: clamp_count(call.int_arg(1), 1).max(1),
                mined: 0,
                target: None,
            },
            "craftItem" => Op::Craft {
                item: s(0),
                count: clamp_count(call.int_arg(1), 1),
                started: false,
            },
            "placeItem" => Op::Place {
                item: s(0),
                at: coords(&call, 1),
                started: false,
            },
            "smeltItem" => Op::Smelt {
                input: s(0),
                count: clamp_count(call.int_arg(2), 1),
                furnace: None,
                queued: 0,
            },
            "farm" => {
                let mode = match s(0).as_str() {
                    "plant" => FarmMode::Plant,
                    "harvest" => FarmMode::Harvest,
                    "destroy" => FarmMode::Destroy,
                    other => {
                        return Err(format!(
                            "farm: unknown mode `{other}`, expected plant, harvest or destroy"
                        ))
                    }
                };
                let name = s(1);
                match Crop::parse(&name) {
                    Some(crop) => Op::Farm {
                        mode,
                        crop,
                        cells: Vec::new(),
                        next: 0,
                        done: 0,
                    },
                    None => Op::Fail(format!("No {name} farm nearby")),
                }
            }
            "killMob" => {
                let timeout = call.int_arg(1).unwrap_or(300).max(0) as u64;
                Op::Kill {
                    kind: s(0),
                    timeout,
                    deadline: now.saturating_add(timeout),
                    target: None,
                }
            }
            "giveToPlayer" => {
                let player = s(1);
                let Some(to) = self.world.agent_index(&player) else {
                    return Err(format!("giveToPlayer: unknown player `{player}`"));
                };
                if to == i {
                    Op::Fail("Cannot give items to yourself".to_string())
                } else {
                    Op::Give {
                        item: s(0),
                        to,
                        count: amount(call.int_arg(2)),
                        started: false,
                    }
                }
            }
            "useChest" => {
                let mode = match s(0).as_str() {
                    "get" => ChestMode::Get,
                    "deposit" => ChestMode::Deposit,
                    "check" => ChestMode::Check,
                    other => {
                        return Err(format!(
                            "useChest: unknown mode `{other}`, expected get, deposit or check"
                        ))
                    }
                };
                let item = call.str_arg(4).map(str::to_string);
                if mode != ChestMode::Check && item.is_none() {
                    return Err("useChest: get and deposit need an item".to_string());
                }
                Op::Chest {
                    mode,
                    at: coords(&call, 1),
                    item: item.unwrap_or_default(),
                    count: amount(call.int_arg(5)),
                    started: false,
                }
            }
            "moveTo" => Op::Move {
                to: coords(&call, 0),
                started: false,
            },
            "milkCow" => Op::Milk { target: None },
            "convertFarm" => {
                let (a, b) = (s(0), s(1));
                match (Crop::parse(&a), Crop::parse(&b)) {
                    (Some(from), Some(to)) => Op::Convert {
                        from,
                        to,
                        started: false,
                    },
                    (None, _) => Op::Fail(format!("No {a} nearby to convert")),
                    (_, None) => Op::Fail(format!("Cannot plant {b}")),
                }
            }
            "sendSignal" => {
                let peer = s(0);
                match self.world.agent_index(&peer) {
                    Some(j) if self.is_teammate(i, j) => Op::Send { to: j },
                    _ => return Err(format!("sendSignal: `{peer}` is not a teammate")),
                }
            }
            "waitSignal" => {
                let from = match call.str_arg(0) {
                    None => None,
                    Some(peer) => match self.world.agent_index(peer) {
                        Some(j) if self.is_teammate(i, j) => Some(j),
                        _ => return Err(format!("waitSignal: `{peer}` is not a teammate")),
                    },
                };
                let timeout = call
                    .int_arg(1)
                    .map_or(DEFAULT_SIGNAL_TIMEOUT, |t| t.max(0) as u64);
                Op::WaitSignal {
                    from,
                    deadline: now.saturating_add(timeout),
                }
            }
            other => return Err(format!("{other}: unknown primitive")),
        };
        let instant = matches!(op, Op::Send { .. } | Op::WaitSignal { .. });
        Ok(Task {
            op,
            started: now,
            ready_at: now,
            dest: None,
            instant,
        })
    }

    /// Points the task at `target` (or the cell next to it when `adjacent`),
    /// finishing `work` ticks after arrival.
    fn go(&self, i: usize, task: &mut Task, target: Position, adjacent: bool, work: u64) {
        let from = self.pos(i);
        let dest = if adjacent { approach(from, target) } else { target };
        task.dest = Some(dest);
        task.ready_at = self.world.tick + from.chebyshev(dest) + work;
    }

    pub(super) fn run_task(&mut self, i: usize, task: &mut Task) -> Progress {
        if let Some(dest) = task.dest.take() {
            self.world.agents[i].position = dest;
            self.pickup(i);
        }
        let mut op = std::mem::replace(&mut task.op, Op::Milk { target: None });
        let progress = match &mut op {
            Op::Fail(text) => fail(text.clone()),
            Op::Mine {
                name,
                max,
                mined,
                target,
            } => self.run_mine(i, task, name, *max, mined, target),
            Op::Craft {
                item,
                count,
                started,
            } => self.run_craft(i, task, item, *count, started),
            Op::Place { item, at, started } => self.run_place(i, task, item, *at, started),
            Op::Smelt {
                input,
                count,
                furnace,
                queued,
            } => self.run_smelt(i, task, input, *count, furnace, queued),
            Op::Farm {
                mode,
                crop,
                cells,
                next,
                done,
            } => self.run_farm(i, task, *mode, *crop, cells, next, done),
            Op::Kill {
                kind,
                timeout,
                deadline,
                target,
            } => self.run_kill(i, task, kind, *timeout, *deadline, target),
            Op::Give {
                item,
                to,
                count,
                started,
            } => self.run_give(i, task, item, *to, *count, started),
            Op::Chest {
                mode,
                at,
                item,
                count,
                started,
            } => self.run_chest(i, task, *mode, *at, item, *count, started),
            Op::Move { to, started } => {
                if *started {
                    done(format!("Moved to {to}"))
                } else if !self.world.in_bounds(*to) || to.y != 0 {
                    fail(format!("Cannot reach {to}"))
                } else {
                    *started = true;
                    self.go(i, task, *to, false, 0);
                    if task.ready_at == self.world.tick {
                        task.dest = None;
                        done(format!("Moved to {to}"))
                    } else {
                        Progress::Pending
                    }
                }
            }
            Op::Milk { target } => self.run_milk(i, task, target),
            Op::Convert { from, to, started } => self.run_convert(i, task, *from, *to, started),
            Op::Send { to } => {
                let to = *to;
                let sender = self.world.agents[i].name.clone();
                self.mailboxes[to].push(sender);
                let receiver = self.world.agents[to].name.clone();
                if let Some(t) = self.slots[to].task.as_mut() {
                    if matches!(t.op, Op::WaitSignal { .. }) {
                        t.ready_at = self.world.tick;
                        if to < i {
                            self.woken.push(to);
                        }
                    }
                }
                done(format!("Sent signal to {receiver}"))
            }
            Op::WaitSignal { from, deadline } => {
                let names: Vec<String> = match from {
                    Some(j) => vec![self.world.agents[*j].name.clone()],
                    None => (0..self.world.agents.len())
                        .filter(|&j| self.is_teammate(i, j))
                        .map(|j| self.world.agents[j].name.clone())
                        .collect(),
                };
                let inbox = &mut self.mailboxes[i];
                if let Some(k) = inbox.iter().position(|s| names.contains(s)) {
                    let sender = inbox.remove(k);
                    done(format!("Received signal from {sender}"))
                } else if self.world.tick >= *deadline {
                    fail("Timed out waiting for signal")
                } else {
                    task.ready_at = self.world.tick + 1;
                    Progress::Pending
                }
            }
        };
        task.op = op;
        progress
    }

    /// Breaks the block at `p`; drops land on the ground there.
    fn break_block(&mut self, p: Position) {
        let cell = self.world.cell(p).expect("in bounds").clone();
        let area = cell.owner_area;
        match cell.kind {
            Block::SlimeBlock | Block::Dirt | Block::CraftingTable => {
                self.world.cell_mut(p).expect("in bounds").set_kind(Block::Air, 0);
                self.world.drop_items(p, cell.kind.id(), 1, area);
            }
            Block::RedMushroomBlock => {
                self.world.cell_mut(p).expect("in bounds").set_kind(Block::Air, 0);
                let (n, item) = match self.scenario.config.mushroom.as_ref() {
                    Some(rules) => (mushroom_yield(&mut self.world.rng, rules), rules.item.clone()),
                    None => (1, "red_mushroom".to_string()),
                };
                self.world.drop_items(p, &item, n, area);
            }
            Block::Crop(crop) => {
                let drops = crop_drops(&mut self.world, crop, cell.is_mature(), &self.scenario.config.harvest);
                for (item, n) in drops {
                    self.world.drop_items(p, &item, n, area);
                }
                self.after_harvest(p, crop, None);
            }
            _ => return,
        }
        if let Some(rules) = self.scenario.config.mushroom.as_ref() {
            on_block_removed(&mut self.world, p, cell.kind, rules);
        }
    }

    /// Perennials drop back to their regrow stage; annuals are replanted from
    /// `seeds` when given one, otherwise the soil is left bare.
    fn after_harvest(&mut self, p: Position, crop: Crop, replant_from: Option<usize>) {
        if crop.is_perennial() {
            self.world.plant(p, crop, crop.regrow_stage());
            return;
        }
        if let Some(i) = replant_from {
            if self.world.agents[i].inventory.take(crop.seed_item(), 1) == 1 {
                self.world.plant(p, crop, 0);
                return;
            }
        }
        self.world
            .cell_mut(p)
            .expect("in bounds")
            .set_kind(soil_block(crop.soil()), 0);
    }

    fn run_mine(
        &mut self,
        i: usize,
        task: &mut Task,
        name: &str,
        max: u32,
        mined: &mut u32,
        target: &mut Option<(Position, u32)>,
    ) -> Progress {
        let Some(block) = Block::parse(name) else {
            return fail(format!("Cannot mine {name}"));
        };
        if !matches!(
            block,
            Block::SlimeBlock | Block::RedMushroomBlock | Block::Dirt | Block::CraftingTable | Block::Crop(_)
        ) {
            return fail(format!("Cannot mine {name}"));
        }
        let wanted = |c: &crate::world::BlockCell| c.kind == block && (block.crop().is_none() || c.is_mature());
        if let Some((p, epoch)) = target.take() {
            let cell = self.world.cell(p).expect("in bounds");
            if wanted(cell) && cell.epoch == epoch {
                self.break_block(p);
                self.pickup(i);
                *mined += 1;
            }
        }
        if *mined >= max {
            return done(format!("Mined {mined} {name}"));
        }
        let next = self.nearest_cell(i, |p| wanted(self.world.cell(p).expect("in bounds")));
        match next {
            Some(p) => {
                *target = Some((p, self.world.cell(p).expect("in bounds").epoch));
                self.go(i, task, p, true, self.scenario.config.costs.mine);
                Progress::Pending
            }
            None if *mined > 0 => done(format!("Mined {mined} {name}")),
            None => fail(format!("No {name} nearby")),
        }
    }

    fn run_craft(&mut self, i: usize, task: &mut Task, item: &str, count: u32, started: &mut bool) -> Progress {
        if count == 0 {
            return fail(format!("Crafted 0 {item}"));
        }
        let Some(recipe) = recipe_lookup(&self.scenario.recipes, item).cloned() else {
            return fail(format!("I cannot make {item} because there is no recipe for it"));
        };
        if recipe.needs_furnace {
            return fail(format!("I cannot make {item} by crafting; it must be smelted"));
        }
        let inv = &self.world.agents[i].inventory;
        let n = craftable(&recipe, inv, count);
        if n == 0 {
            return fail(format!(
                "I cannot make {item} because I need: {}",
                missing(&recipe, inv, 1)
            ));
        }
        if !*started {
            *started = true;
            let work = self.scenario.config.costs.craft * u64::from(n);
            if recipe.needs_table {
                let table = self.nearest_cell(i, |p| {
                    self.world.cell(p).expect("in bounds").kind == Block::CraftingTable
                });
                let Some(table) = table else {
                    return fail(format!(
                        "I cannot make {item} because there is no crafting table nearby"
                    ));
                };
                self.go(i, task, table, true, work);
            } else {
                task.ready_at = self.world.tick + work;
            }
            return Progress::Pending;
        }
        let inv = &mut self.world.agents[i].inventory;
        for (input, need) in &recipe.inputs {
            inv.take(input, need * n);
        }
        for (extra, k) in &recipe.returns {
            inv.add(extra, k * n);
        }
        let made = recipe.output_count * n;
        inv.add(&recipe.output, made);
        done(format!("Crafted {made} {item}"))
    }

    fn run_place(&mut self, i: usize, task: &mut Task, item: &str, at: Position, started: &mut bool) -> Progress {
        let Some(block) = Block::parse(item).filter(|b| b.is_placeable()) else {
            return fail(format!("Cannot place {item}"));
        };
        if self.world.agents[i].inventory.count(item) == 0 {
            return fail(format!("No {item} in inventory"));
        }
        if at.y != 0 || !self.world.in_bounds(at) {
            return fail(format!("Cannot place {item} at {at}: out of reach"));
        }
        if self.world.cell(at).expect("in bounds").kind != Block::Air {
            return fail(format!("Cannot place {item} at {at}: occupied"));
        }
        if !*started {
            *started = true;
            self.go(i, task, at, true, self.scenario.config.costs.place);
            return Progress::Pending;
        }
        self.world.agents[i].inventory.take(item, 1);
        let team = self.world.agents[i].team;
        let cell = self.world.cell_mut(at).expect("in bounds");
        cell.set_kind(block, 0);
        cell.placed_by = Some(team);
        if let Some(rules) = self.scenario.config.mushroom.as_ref() {
            on_block_added(&mut self.world, at, rules);
        }
        done(format!("Placed {item} at {at}"))
    }

    fn run_smelt(
        &mut self,
        i: usize,
        task: &mut Task,
        input: &str,
        count: u32,
        furnace: &mut Option<Position>,
        queued: &mut u32,
    ) -> Progress {
        let now = self.world.tick;
        let Some(recipe) = self.scenario.recipes.smelting(input).cloned() else {
            return fail(format!("I cannot smelt {input}"));
        };
        let output = recipe.output.clone();
        if *queued > 0 {
            return done(format!("Finished smelting {queued} {input} into {output}"));
        }
        if count == 0 {
            return fail(format!("Smelted 0 {input}"));
        }
        let have = self.world.agents[i].inventory.count(input);
        let smelt = self.scenario.config.costs.smelt;
        match *furnace {
            None => {
                if have < count {
                    return fail(format!(
                        "I cannot smelt {input} because I need: {} more {input}",
                        count - have
                    ));
                }
                let from = self.pos(i);
                let radius = u64::from(self.radius());
                let near: Vec<(u64, Position, bool)> = self
                    .world
                    .furnaces
                    .iter()
                    .map(|(p, f)| (p.chebyshev(from), *p, f.busy_until <= now))
                    .filter(|(d, _, _)| *d <= radius)
                    .collect();
                if near.is_empty() {
                    return fail("No furnace nearby");
                }
                let Some(&(_, p, _)) = near.iter().filter(|f| f.2).min() else {
                    return fail("All furnaces busy");
                };
                *furnace = Some(p);
                self.go(i, task, p, true, self.scenario.config.costs.furnace_load);
                // reserved while the agent walks over
                self.world.furnaces.get_mut(&p).expect("furnace").busy_until =
                    task.ready_at + smelt * u64::from(count);
                Progress::Pending
            }
            Some(p) => {
                let n = have.min(count);
                if n == 0 {
                    self.world.furnaces.get_mut(&p).expect("furnace").busy_until = now;
                    return fail(format!("I cannot smelt {input} because I need: {count} more {input}"));
                }
                let per = recipe.inputs.get(input).copied().unwrap_or(1);
                self.world.agents[i].inventory.take(input, n * per);
                let agent = self.world.agents[i].name.clone();
                for k in 1..=u64::from(n) {
                    let effect = TimerEffect::SmeltComplete {
                        furnace: p,
                        agent: agent.clone(),
                        output: output.clone(),
                        count: recipe.output_count,
                    };
                    self.world
                        .schedule_after(effect, smelt * k)
                        .expect("furnace timer");
                }
                let end = now + smelt * u64::from(n);
                self.world.furnaces.get_mut(&p).expect("furnace").busy_until = end;
                self.world
                    .push_chat(&agent, format!("Queued {n} {input} in furnace at {p}"));
                *queued = n;
                task.ready_at = end;
                Progress::Pending
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_farm(
        &mut self,
        i: usize,
        task: &mut Task,
        mode: FarmMode,
        crop: Crop,
        cells: &mut Vec<Position>,
        next: &mut usize,
        count: &mut u32,
    ) -> Progress {
        let verb = match mode {
            FarmMode::Plant => "Planted",
            FarmMode::Harvest => "Harvested",
            FarmMode::Destroy => "Destroyed",
        };
        let seed = crop.seed_item();
        let soil = soil_block(crop.soil());
        if cells.is_empty() {
            let from = self.pos(i);
            let radius = self.radius();
            let w = &self.world;
            let patch = match mode {
                FarmMode::Harvest => nearest_patch(w, from, radius, |b| b == Block::Crop(crop), |p| {
                    w.cell(p).expect("in bounds").is_mature()
                })
                .map(|p| p.into_iter().filter(|c| w.cell(*c).expect("in bounds").is_mature()).collect()),
                FarmMode::Destroy => nearest_patch(w, from, radius, |b| b == Block::Crop(crop), |_| true),
                FarmMode::Plant => {
                    if w.agents[i].inventory.count(seed) == 0 {
                        return fail(format!("No {seed} to plant {crop}", crop = crop.id()));
                    }
                    nearest_patch(w, from, radius, |b| b == soil, |_| true)
                }
            };
            let Some(patch) = patch else {
                return fail(match mode {
                    FarmMode::Harvest => format!("No mature {} nearby to harvest", crop.id()),
                    FarmMode::Destroy => format!("No {} nearby to destroy", crop.id()),
                    FarmMode::Plant => format!("No empty {soil} nearby to plant {}", crop.id()),
                });
            };
            *cells = patch;
        } else {
            let p = cells[*next];
            *next += 1;
            let cell = self.world.cell(p).expect("in bounds");
            let harvest = &self.scenario.config.harvest;
            match mode {
                FarmMode::Harvest if cell.kind == Block::Crop(crop) && cell.is_mature() => {
                    for (item, n) in crop_drops(&mut self.world, crop, true, harvest) {
                        self.world.agents[i].inventory.add(&item, n);
                    }
                    self.after_harvest(p, crop, Some(i));
                    *count += 1;
                }
                FarmMode::Destroy if cell.kind == Block::Crop(crop) => {
                    let mature = cell.is_mature();
                    for (item, n) in crop_drops(&mut self.world, crop, mature, harvest) {
                        self.world.agents[i].inventory.add(&item, n);
                    }
                    self.world.cell_mut(p).expect("in bounds").set_kind(Block::Dirt, 0);
                    *count += 1;
                }
                FarmMode::Plant if cell.kind == soil => {
                    if self.world.agents[i].inventory.take(seed, 1) == 1 {
                        self.world.plant(p, crop, 0);
                        *count += 1;
                    } else {
                        *next = cells.len();
                    }
                }
                _ => {}
            }
        }
        if *next >= cells.len() {
            let text = format!("{verb} {count} {}", crop.id());
            return if *count > 0 { done(text) } else { fail(text) };
        }
        self.go(i, task, cells[*next], true, self.scenario.config.costs.farm);
        Progress::Pending
    }

    fn run_kill(
        &mut self,
        i: usize,
        task: &mut Task,
        kind: &str,
        timeout: u64,
        deadline: u64,
        target: &mut Option<usize>,
    ) -> Progress {
        if let Some(k) = target.take() {
            if self.world.mobs[k].alive {
                self.world.mobs[k].alive = false;
                let drops = self
                    .scenario
                    .config
                    .mob_drops
                    .iter()
                    .find(|d| d.mob == kind)
                    .map(|d| roll_drops(&d.drops, &mut self.world.rng))
                    .unwrap_or_default();
                for (item, n) in drops {
                    self.world.agents[i].inventory.add(&item, n);
                }
                let delay = self.world.rules.mob_respawn;
                self.world
                    .schedule(TimerEffect::MobRespawn { mob: k }, &delay)
                    .expect("mob timer");
                return done(format!("Killed {kind}"));
            }
        }
        let now = self.world.tick;
        match self.nearest_mob(i, kind) {
            Some(k) => {
                *target = Some(k);
                let at = self.world.mobs[k].position;
                self.go(i, task, at, true, self.scenario.config.costs.kill);
                Progress::Pending
            }
            None if now >= deadline => fail(format!("No {kind} found within {timeout} ticks")),
            None => {
                task.ready_at = now + 1;
                Progress::Pending
            }
        }
    }

    fn run_give(
        &mut self,
        i: usize,
        task: &mut Task,
        item: &str,
        to: usize,
        count: Option<u32>,
        started: &mut bool,
    ) -> Progress {
        let receiver = self.world.agents[to].name.clone();
        if count == Some(0) {
            return fail(format!("Gave 0 {item} to {receiver}"));
        }
        let have = self.world.agents[i].inventory.count(item);
        if have == 0 {
            return fail(format!("No {item} in inventory"));
        }
        if !*started {
            *started = true;
            let at = self.world.agents[to].position;
            self.go(i, task, at, true, self.scenario.config.costs.give);
            return Progress::Pending;
        }
        let n = self.world.agents[i].inventory.take(item, count.unwrap_or(have).min(have));
        self.world.agents[to].inventory.add(item, n);
        if self.world.agents[to].role == AgentRole::Server {
            let team = self.world.agents[to].team;
            let giver = self.world.agents[i].name.clone();
            let cfg = &self.scenario.config;
            score_hand_in(
                &mut self.scores[team.index()],
                item,
                n,
                &cfg.points,
                cfg.max_food_types.unwrap_or(usize::MAX),
                self.world.tick,
                &giver,
            );
        }
        done(format!("Gave {n} {item} to {receiver}"))
    }

    #[allow(clippy::too_many_arguments)]
    fn run_chest(
        &mut self,
        i: usize,
        task: &mut Task,
        mode: ChestMode,
        at: Position,
        item: &str,
        count: Option<u32>,
        started: &mut bool,
    ) -> Progress {
        if !self.world.chests.contains_key(&at) {
            return fail(format!("There is no chest at {at}"));
        }
        if mode == ChestMode::Deposit && self.world.agents[i].inventory.count(item) == 0 {
            return fail(format!("No {item} in inventory"));
        }
        if !*started {
            *started = true;
            self.go(i, task, at, true, self.scenario.config.costs.chest);
            return Progress::Pending;
        }
        let name = self.world.agents[i].name.clone();
        self.world.mark_chest_interaction(&name, at);
        let chest = self.world.chests.get_mut(&at).expect("checked");
        let inv = &mut self.world.agents[i].inventory;
        match mode {
            ChestMode::Get => {
                let avail = chest.count(item);
                if avail == 0 {
                    return fail(format!("Chest at {at} has no {item}"));
                }
                let n = chest.take(item, count.unwrap_or(avail).min(avail));
                inv.add(item, n);
                if n == 0 {
                    fail(format!("Got 0 {item} from chest at {at}"))
                } else {
                    done(format!("Got {n} {item} from chest at {at}"))
                }
            }
            ChestMode::Deposit => {
                let have = inv.count(item);
                let n = inv.take(item, count.unwrap_or(have).min(have));
                chest.add(item, n);
                if n == 0 {
                    fail(format!("Deposited 0 {item} in chest at {at}"))
                } else {
                    done(format!("Deposited {n} {item} in chest at {at}"))
                }
            }
            ChestMode::Check if chest.is_empty() => done(format!("Chest at {at} is empty")),
            ChestMode::Check => {
                let items: Vec<String> = chest.iter().map(|(k, n)| format!("{k} {n}")).collect();
                done(format!("Chest at {at} contains: {}", items.join(", ")))
            }
        }
    }

    fn run_milk(&mut self, i: usize, task: &mut Task, target: &mut Option<usize>) -> Progress {
        if self.world.agents[i].inventory.count("bucket") == 0 {
            return fail("I cannot milk a cow because I need: 1 more bucket");
        }
        if let Some(k) = target.take() {
            if self.world.mobs[k].alive {
                let inv = &mut self.world.agents[i].inventory;
                inv.take("bucket", 1);
                inv.add("milk_bucket", 1);
                return done("Filled 1 milk_bucket from cow");
            }
        }
        match self.nearest_mob(i, "cow") {
            Some(k) => {
                *target = Some(k);
                let at = self.world.mobs[k].position;
                self.go(i, task, at, true, self.scenario.config.costs.milk);
                Progress::Pending
            }
            None => fail("No cow nearby"),
        }
    }

    fn run_convert(&mut self, i: usize, task: &mut Task, from: Crop, to: Crop, started: &mut bool) -> Progress {
        if from == to {
            return fail(format!("{} is already {}", from.id(), to.id()));
        }
        if conversion_needs_hoe(from, to) && self.world.agents[i].inventory.count("hoe") == 0 {
            return fail(format!(
                "I cannot convert {} to {} because I need: 1 more hoe",
                from.id(),
                to.id()
            ));
        }
        if !*started {
            let origin = self.pos(i);
            let patch = nearest_patch(&self.world, origin, self.radius(), |b| b == Block::Crop(from), |_| true);
            let Some(patch) = patch else {
                return fail(format!("No {} nearby to convert", from.id()));
            };
            *started = true;
            let nearest = *patch
                .iter()
                .min_by_key(|p| p.chebyshev(origin))
                .expect("non-empty patch");
            let work = self.scenario.config.costs.farm * patch.len() as u64;
            self.go(i, task, nearest, true, work);
            return Progress::Pending;
        }
        let radius = self.radius();
        let harvest = self.scenario.config.harvest.clone();
        match sabotage_transform(&mut self.world, i, from, to, radius, &harvest) {
            Ok(cells) => {
                self.pickup(i);
                done(format!("Converted {} {} to {}", cells.len(), from.id(), to.id()))
            }
            Err(msg) => fail(msg),
        }
    }
}
