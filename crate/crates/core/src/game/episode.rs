//! One full episode between two team systems.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actionlang::ExecStatus;
use crate::scenarios::{Scenario, ScenarioKind, TeamScore};
use crate::team::{LlmCallRecord, PostGameInfo, PreGameInfo, ProgramEnd, TeamSystem};
use crate::world::{Event, EventKind, Team, WorldError};

use super::Game;

#[derive(Clone, Debug, Default)]
pub struct EpisodeOptions {
    pub seed: u64,
    /// Index within the current series; passed to the team systems.
    pub episode: u32,
    /// Keep observe events in the result log (chat is always kept).
    pub keep_observations: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Red,
    Blue,
    Draw,
}

impl Winner {
    pub fn from_points(red: u32, blue: u32) -> Self {
        match red.cmp(&blue) {
            std::cmp::Ordering::Greater => Winner::Red,
            std::cmp::Ordering::Less => Winner::Blue,
            std::cmp::Ordering::Equal => Winner::Draw,
        }
    }
}

/// One team's view of a finished episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSide {
    pub system: String,
    pub team: Team,
    pub score: TeamScore,
    pub llm_calls: Vec<LlmCallRecord>,
    /// Programs run per own agent.
    pub iterations: Vec<(String, u32)>,
    /// Programs that stopped with a runtime error.
    pub runtime_errors: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub episode: u32,
    pub duration: u64,
    pub red: EpisodeSide,
    pub blue: EpisodeSide,
    pub winner: Winner,
    pub events: Vec<Event>,
}

impl EpisodeResult {
    pub fn side(&self, team: Team) -> &EpisodeSide {
        match team {
            Team::Red => &self.red,
            Team::Blue => &self.blue,
        }
    }

    pub fn points(&self, team: Team) -> u32 {
        self.side(team).score.points
    }
}

fn pre_game_info(game: &Game, team: Team, episode: u32) -> PreGameInfo {
    let s = game.scenario();
    let agents = s.players(team);
    let observations = agents
        .iter()
        .map(|a| game.observe(game.agent_index(a).expect("layout agent")))
        .collect();
    PreGameInfo {
        scenario: s.kind(),
        title: s.config.title.clone(),
        description: s.config.description.clone(),
        objective: s.config.objective.clone(),
        team,
        episode,
        duration: s.duration(),
        agents,
        server: s.server(team),
        opponents: s.players(team.opponent()),
        primitives: s.primitives.clone(),
        constants: s.constants(team),
        observations,
    }
}

/// Plays one episode. Team systems keep their state for the next one.
pub fn run_episode(
    scenario: Arc<Scenario>,
    red: &mut dyn TeamSystem,
    blue: &mut dyn TeamSystem,
    opts: &EpisodeOptions,
) -> Result<EpisodeResult, WorldError> {
    let mut game = Game::new(Arc::clone(&scenario), opts.seed)?;
    let mut systems: [&mut dyn TeamSystem; 2] = [red, blue];
    let mut calls: [Vec<LlmCallRecord>; 2] = [Vec::new(), Vec::new()];
    let mut errors = [0u32; 2];

    for team in [Team::Red, Team::Blue] {
        let info = pre_game_info(&game, team, opts.episode);
        let sys = &mut systems[team.index()];
        let programs = sys.pre_game(&info);
        for (name, program) in info.agents.iter().zip(programs) {
            let i = game.agent_index(name).expect("layout agent");
            game.install(i, program, 1);
        }
        calls[team.index()].extend(sys.take_llm_records());
    }

    while !game.is_over() {
        for ended in game.step() {
            let i = ended.agent;
            let team = game.world.agents[i].team;
            if matches!(ended.status, ExecStatus::Error(_)) {
                errors[team.index()] += 1;
            }
            let observation = game.observe(i);
            let next = {
                let end = ProgramEnd {
                    agent: &game.world.agents[i].name,
                    tick: game.tick(),
                    status: &ended.status,
                    program: game.program(i).expect("ended program"),
                    events: game.agent_log(i),
                    observation: &observation,
                    iteration: game.iterations(i),
                };
                systems[team.index()].on_program_end(&end)
            };
            calls[team.index()].extend(systems[team.index()].take_llm_records());
            if let Some(next) = next {
                let start = game.tick() + 1 + next.idle_ticks;
                game.install(i, next.program, start);
            }
        }
    }
    game.finish();

    let points = [game.score(Team::Red).points, game.score(Team::Blue).points];
    let mut sides = Vec::with_capacity(2);
    for team in [Team::Red, Team::Blue] {
        let agents = scenario.players(team);
        let idx: Vec<usize> = agents
            .iter()
            .map(|a| game.agent_index(a).expect("layout agent"))
            .collect();
        let info = PostGameInfo {
            team,
            episode: opts.episode,
            own_score: points[team.index()],
            opponent_score: points[team.opponent().index()],
            logs: agents
                .iter()
                .zip(&idx)
                .map(|(a, &i)| (a.clone(), game.agent_log(i).to_vec()))
                .collect(),
            final_status: agents
                .iter()
                .zip(&idx)
                .map(|(a, &i)| (a.clone(), game.exec_status(i).cloned().unwrap_or(ExecStatus::Done)))
                .collect(),
        };
        let sys = &mut systems[team.index()];
        sys.post_game(&info);
        calls[team.index()].extend(sys.take_llm_records());
        sides.push(EpisodeSide {
            system: sys.name(),
            team,
            score: game.score(team).clone(),
            llm_calls: std::mem::take(&mut calls[team.index()]),
            iterations: agents
                .iter()
                .zip(&idx)
                .map(|(a, &i)| (a.clone(), game.iterations(i)))
                .collect(),
            runtime_errors: errors[team.index()],
        });
    }
    let blue_side = sides.pop().expect("two sides");
    let red_side = sides.pop().expect("two sides");
    let events = std::mem::take(&mut game.world.chat_log)
        .into_iter()
        .filter(|e| opts.keep_observations || e.kind() == EventKind::Chat)
        .collect();
    Ok(EpisodeResult {
        scenario: scenario.kind(),
        seed: opts.seed,
        episode: opts.episode,
        duration: scenario.duration(),
        winner: Winner::from_points(points[0], points[1]),
        red: red_side,
        blue: blue_side,
        events,
    })
}
