//! Primitive execution and the per-tick driver.
//!
//! Each tick the world's timers fire first, then agents act in index order.
//! An agent runs control flow until it reaches a primitive, a `wait` or a
//! yield; a primitive then occupies the agent until its `ready_at` tick,
//! when its effect lands. Walking costs one tick per cell (Chebyshev) and is
//! folded into the same deadline; the agent's position updates on arrival.
//!
//! Every finished primitive broadcasts a chat line from the agent and gives
//! it a private observe event. World-dependent failures (nothing to mine,
//! missing ingredients, busy furnaces) are feedback: the program continues
//! and `ok()` turns false. Malformed calls are runtime errors that stop the
//! program and are reported back to the team system.

mod episode;
mod prims;

use std::sync::Arc;

use crate::actionlang::{ExecContext, ExecState, ExecStatus, Program, Step};
use crate::scenarios::{on_block_added, score_mushroom, Scenario, TeamScore};
use crate::world::{Event, Observation, Team, TimerEffect, WorldError, WorldState};

pub use episode::{run_episode, EpisodeOptions, EpisodeResult, EpisodeSide, Winner};
pub use prims::MAX_INSTANT_PER_TICK;

use prims::{Progress, Task};

/// A program that stopped during a tick.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramEnded {
    pub agent: usize,
    pub status: ExecStatus,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    exec: Option<ExecState>,
    /// The agent does nothing before this tick (waits, idle charges).
    start_at: u64,
    task: Option<Task>,
    last_ok: bool,
    iterations: u32,
    primitives: u64,
}

#[derive(Clone, Debug)]
pub struct Game {
    scenario: Arc<Scenario>,
    pub world: WorldState,
    scores: [TeamScore; 2],
    slots: Vec<Slot>,
    logs: Vec<Vec<Event>>,
    synced: usize,
    mailboxes: Vec<Vec<String>>,
    woken: Vec<usize>,
}

struct Ctx<'a> {
    game: &'a Game,
    agent: usize,
    ok: bool,
}

impl ExecContext for Ctx<'_> {
    fn item_count(&self, item: &str) -> u32 {
        self.game.world.agents[self.agent].inventory.count(item)
    }
    fn last_ok(&self) -> bool {
        self.ok
    }
}

impl Game {
    pub fn new(scenario: Arc<Scenario>, seed: u64) -> Result<Self, WorldError> {
        let world = WorldState::new(&scenario.layout, seed, scenario.config.world_rules())?;
        let n = world.agents.len();
        Ok(Self {
            scenario,
            world,
            scores: [TeamScore::new(Team::Red), TeamScore::new(Team::Blue)],
            slots: vec![Slot::default(); n],
            logs: vec![Vec::new(); n],
            synced: 0,
            mailboxes: vec![Vec::new(); n],
            woken: Vec::new(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tick(&self) -> u64 {
        self.world.tick
    }

    pub fn is_over(&self) -> bool {
        self.world.is_over()
    }

    pub fn score(&self, team: Team) -> &TeamScore {
        &self.scores[team.index()]
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.world.agent_index(name)
    }

    /// Event log visible to an agent: all chat plus its own observations.
    pub fn agent_log(&self, agent: usize) -> &[Event] {
        &self.logs[agent]
    }

    pub fn observe(&self, agent: usize) -> Observation {
        self.world
            .observe(&self.world.agents[agent].name, self.scenario.config.observe_radius)
            .expect("agent exists")
    }

    /// Programs started by the agent this episode.
    pub fn iterations(&self, agent: usize) -> u32 {
        self.slots[agent].iterations
    }

    pub fn primitives_run(&self, agent: usize) -> u64 {
        self.slots[agent].primitives
    }

    pub fn exec_status(&self, agent: usize) -> Option<&ExecStatus> {
        self.slots[agent].exec.as_ref().map(ExecState::status)
    }

    pub fn program(&self, agent: usize) -> Option<&Program> {
        self.slots[agent].exec.as_ref().map(ExecState::program)
    }

    /// Starts `program` for `agent`; it first acts at tick `start_at`.
    pub fn install(&mut self, agent: usize, program: Program, start_at: u64) {
        let slot = &mut self.slots[agent];
        slot.exec = Some(ExecState::new(program));
        slot.task = None;
        slot.start_at = start_at.max(self.world.tick + 1);
        slot.last_ok = true;
        slot.iterations += 1;
    }

    /// Stops the agent's program; it idles from now on.
    pub fn clear(&mut self, agent: usize) {
        self.slots[agent].exec = None;
        self.slots[agent].task = None;
    }

    /// Ends every running program at the episode boundary.
    pub fn finish(&mut self) {
        for slot in &mut self.slots {
            if let Some(exec) = &mut slot.exec {
                exec.finish();
            }
            slot.task = None;
        }
        self.sync_logs();
    }

    /// Advances one tick. Returns the programs that ended during it.
    pub fn step(&mut self) -> Vec<ProgramEnded> {
        let scenario = Arc::clone(&self.scenario);
        let mushroom = scenario.config.mushroom.as_ref();
        self.world.step_tick_with(|w, effect| {
            if let (Some(rules), TimerEffect::RegrowBlock { cell, .. }) = (mushroom, effect) {
                on_block_added(w, *cell, rules);
            }
        });
        let mut ended = Vec::new();
        for i in 0..self.slots.len() {
            self.advance(i, &mut ended);
        }
        // agents released by a signal sent later in the same tick
        while !self.woken.is_empty() {
            let woken = std::mem::take(&mut self.woken);
            for i in woken {
                self.advance(i, &mut ended);
            }
        }
        if !self.world.ground_items.is_empty() {
            for i in 0..self.world.agents.len() {
                self.pickup(i);
            }
        }
        self.sync_logs();
        ended
    }

    fn advance(&mut self, i: usize, ended: &mut Vec<ProgramEnded>) {
        let now = self.world.tick;
        let mut slot = std::mem::take(&mut self.slots[i]);
        let running = slot.exec.as_ref().is_some_and(ExecState::is_running);
        if !running || now < slot.start_at {
            self.slots[i] = slot;
            return;
        }
        let mut instant = 0;
        loop {
            if let Some(mut task) = slot.task.take() {
                if now < task.ready_at {
                    slot.task = Some(task);
                    break;
                }
                match self.run_task(i, &mut task) {
                    Progress::Pending => {
                        slot.task = Some(task);
                        break;
                    }
                    Progress::Done { ok, text } => {
                        self.complete(i, &text);
                        slot.last_ok = ok;
                        slot.primitives += 1;
                        if task.started == now && !task.instant {
                            // nothing took time: charge one tick so loops progress
                            slot.start_at = now + 1;
                            break;
                        }
                    }
                }
            }
            if instant >= MAX_INSTANT_PER_TICK {
                break;
            }
            instant += 1;
            let exec = slot.exec.as_mut().expect("checked above");
            let step = {
                let ctx = Ctx {
                    game: self,
                    agent: i,
                    ok: slot.last_ok,
                };
                exec.step(&ctx)
            };
            match step {
                Step::Primitive(call) => match self.start_task(i, call) {
                    Ok(task) => slot.task = Some(task),
                    Err(message) => {
                        exec.fail(message.clone());
                        ended.push(ProgramEnded {
                            agent: i,
                            status: ExecStatus::Error(message),
                        });
                        break;
                    }
                },
                Step::Wait(0) => {}
                Step::Wait(n) => {
                    slot.start_at = now + n;
                    break;
                }
                Step::Say(text) => {
                    let name = self.world.agents[i].name.clone();
                    self.world.push_chat(&name, text);
                }
                Step::Yield => break,
                Step::Done => {
                    ended.push(ProgramEnded {
                        agent: i,
                        status: ExecStatus::Done,
                    });
                    break;
                }
                Step::Error(message) => {
                    ended.push(ProgramEnded {
                        agent: i,
                        status: ExecStatus::Error(message),
                    });
                    break;
                }
            }
        }
        self.slots[i] = slot;
    }

    /// Broadcasts the primitive's chat line and records the observation.
    fn complete(&mut self, i: usize, text: &str) {
        let name = self.world.agents[i].name.clone();
        self.world.push_chat(&name, text);
        let obs = self.observe(i);
        self.world.chat_log.push(Event::observe(self.world.tick, &name, obs));
    }

    /// Collects nearby ground items; mushrooms score for their home team.
    fn pickup(&mut self, i: usize) {
        if self.world.ground_items.is_empty() {
            return;
        }
        let picked = self.world.pickup_near(i);
        let Some(rules) = self.scenario.config.mushroom.as_ref() else { return };
        let team = self.world.agents[i].team;
        let name = self.world.agents[i].name.clone();
        for g in picked {
            if g.item == rules.item {
                score_mushroom(
                    &mut self.scores[team.index()],
                    g.origin_area,
                    &g.item,
                    g.count,
                    self.world.tick,
                    &name,
                );
            }
        }
    }

    fn sync_logs(&mut self) {
        let new = &self.world.chat_log[self.synced..];
        for ev in new {
            match ev.chat_text() {
                Some(_) => {
                    for (i, log) in self.logs.iter_mut().enumerate() {
                        if self.world.agents[i].is_player() {
                            log.push(ev.clone());
                        }
                    }
                }
                None => {
                    if let Some(i) = self.world.agent_index(&ev.sender) {
                        self.logs[i].push(ev.clone());
                    }
                }
            }
        }
        self.synced = self.world.chat_log.len();
    }

    /// Runs ticks until `tick` (or the episode end), ignoring program ends.
    pub fn run_until(&mut self, tick: u64) {
        while self.world.tick < tick.min(self.world.rules.duration) {
            self.step();
        }
    }
}

#[cfg(test)]
mod tests;
