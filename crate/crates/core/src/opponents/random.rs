//! The random baseline: one random, statically valid call at a time.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::actionlang::{check_call, Arg, Call, PrimitiveTable, Program, Stmt};
use crate::team::{NextProgram, PostGameInfo, PreGameInfo, ProgramEnd, TeamSystem};
use crate::world::Observation;

/// Draws per program before falling back to `wait(20)`.
pub const RANDOM_ATTEMPTS: usize = 32;

#[derive(Clone, Debug)]
pub struct RandomPolicyState {
    pub rng: SplitMix64,
    pub history: Vec<Program>,
}

impl RandomPolicyState {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: SplitMix64::seed_from_u64(seed),
            history: Vec::new(),
        }
    }
}

#[derive(Clone, Copy)]
enum Role {
    Block,
    Item,
    Mob,
    Player,
    Crop,
    Mode(&'static [&'static str]),
    Coords,
    Count,
    Timeout,
}

fn roles(primitive: &str) -> &'static [Role] {
    use Role::*;
    match primitive {
        "mineBlock" => &[Block, Count],
        "craftItem" => &[Item, Count],
        "placeItem" => &[Item, Coords],
        "sendSignal" => &[Player],
        "waitSignal" => &[Player, Timeout],
        "farm" => &[Mode(&["plant", "harvest", "destroy"]), Crop],
        "smeltItem" => &[Item, Mode(&["coal"]), Count],
        "killMob" => &[Mob, Timeout],
        "giveToPlayer" => &[Item, Player, Count],
        "useChest" => &[Mode(&["get", "deposit", "check"]), Coords, Item, Count],
        "moveTo" => &[Coords],
        "convertFarm" => &[Crop, Crop],
        _ => &[],
    }
}

/// Argument sources: nearby blocks, nearby entities, inventory items, players.
struct Pools {
    blocks: Vec<String>,
    crops: Vec<String>,
    mobs: Vec<String>,
    items: Vec<String>,
    players: Vec<String>,
    positions: Vec<[i64; 3]>,
}

impl Pools {
    fn new(obs: &Observation, players: &[String]) -> Self {
        let dedup = |it: &mut dyn Iterator<Item = String>| -> Vec<String> {
            it.collect::<BTreeSet<_>>().into_iter().collect()
        };
        let blocks = dedup(&mut obs.nearby_blocks.iter().map(|b| b.kind.clone()));
        let crops = blocks
            .iter()
            .filter(|b| crate::world::Crop::parse(b).is_some())
            .cloned()
            .collect();
        Self {
            crops,
            blocks,
            mobs: dedup(&mut obs.nearby_mobs.iter().map(|m| m.kind.clone())),
            items: obs.inventory.iter().map(|(k, _)| k.to_string()).collect(),
            players: players.to_vec(),
            positions: obs
                .nearby_blocks
                .iter()
                .map(|b| [b.position.x.into(), b.position.y.into(), b.position.z.into()])
                .collect(),
        }
    }
}

fn pick<T: Clone>(rng: &mut SplitMix64, pool: &[T]) -> Option<T> {
    pool.choose(rng).cloned()
}

fn draw(rng: &mut SplitMix64, table: &PrimitiveTable, pools: &Pools) -> Option<Call> {
    let available: Vec<&str> = table.available().map(|p| p.name).collect();
    let name = *available.choose(rng)?;
    let mut args = Vec::new();
    for role in roles(name) {
        match role {
            Role::Block => args.push(Arg::Str(pick(rng, &pools.blocks)?)),
            Role::Item => args.push(Arg::Str(pick(rng, &pools.items)?)),
            Role::Mob => args.push(Arg::Str(pick(rng, &pools.mobs)?)),
            Role::Player => args.push(Arg::Str(pick(rng, &pools.players)?)),
            Role::Crop => args.push(Arg::Str(pick(rng, &pools.crops)?)),
            Role::Mode(choices) => args.push(Arg::Str(pick(rng, choices)?.to_string())),
            Role::Coords => {
                let p = pick(rng, &pools.positions)?;
                args.extend(p.iter().map(|&v| Arg::Int(v)));
            }
            Role::Count => args.push(Arg::Int(rng.gen_range(1..=4))),
            Role::Timeout => args.push(Arg::Int(rng.gen_range(20..=200))),
        }
    }
    Some(Call::new(name, args))
}

/// A single random call that passes static validation, or `wait(20)`.
pub fn random_program(
    state: &mut RandomPolicyState,
    observation: &Observation,
    players: &[String],
    table: &PrimitiveTable,
) -> Program {
    let pools = Pools::new(observation, players);
    let mut program = Program::new(vec![Stmt::Wait(20)]);
    for _ in 0..RANDOM_ATTEMPTS {
        if let Some(call) = draw(&mut state.rng, table, &pools) {
            if check_call(&call, table).is_empty() {
                program = Program::new(vec![Stmt::Call(call)]);
                break;
            }
        }
    }
    state.history.push(program.clone());
    program
}

/// Team system replanning one random call per finished program.
#[derive(Clone, Debug)]
pub struct RandomTeam {
    state: RandomPolicyState,
    players: Vec<String>,
    table: PrimitiveTable,
}

impl RandomTeam {
    pub fn new(seed: u64) -> Self {
        Self {
            state: RandomPolicyState::new(seed),
            players: Vec::new(),
            table: PrimitiveTable::all(),
        }
    }

    pub fn history(&self) -> &[Program] {
        &self.state.history
    }
}

impl TeamSystem for RandomTeam {
    fn name(&self) -> String {
        "random".to_string()
    }

    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program> {
        self.table = info.primitives.clone();
        self.players = info
            .agents
            .iter()
            .chain(info.server.iter())
            .chain(info.opponents.iter())
            .cloned()
            .collect();
        info.observations
            .iter()
            .map(|obs| random_program(&mut self.state, obs, &self.players, &self.table))
            .collect()
    }

    fn on_program_end(&mut self, end: &ProgramEnd<'_>) -> Option<NextProgram> {
        Some(NextProgram {
            program: random_program(&mut self.state, end.observation, &self.players, &self.table),
            idle_ticks: 0,
        })
    }

    fn post_game(&mut self, _info: &PostGameInfo) {}
}
