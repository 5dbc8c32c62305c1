//! The three-phase team API.
//!
//! A team system sees scenario metadata, its own agents' observations and
//! event logs, and public chat. Nothing in these types reaches the other
//! team's system or its agents' private observations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::actionlang::{ExecStatus, PrimitiveTable, Program};
use crate::scenarios::ScenarioKind;
use crate::world::{Event, Observation, Team};

/// Everything a team gets before the game starts.
#[derive(Clone, Debug)]
pub struct PreGameInfo {
    pub scenario: ScenarioKind,
    pub title: String,
    pub description: String,
    pub objective: String,
    pub team: Team,
    /// Zero-based episode index within the current series.
    pub episode: u32,
    pub duration: u64,
    /// Own player agents, in layout order.
    pub agents: Vec<String>,
    pub server: Option<String>,
    /// Public names of the opposing players.
    pub opponents: Vec<String>,
    pub primitives: PrimitiveTable,
    /// Public layout constants (see [`Scenario::constants`](crate::scenarios::Scenario::constants)).
    pub constants: BTreeMap<String, String>,
    /// Initial observation per own agent, same order as `agents`.
    pub observations: Vec<Observation>,
}

/// Passed when one of the team's programs finishes or fails mid-game.
#[derive(Clone, Debug)]
pub struct ProgramEnd<'a> {
    pub agent: &'a str,
    pub tick: u64,
    pub status: &'a ExecStatus,
    pub program: &'a Program,
    /// The agent's event log: all chat plus its own observations.
    pub events: &'a [Event],
    pub observation: &'a Observation,
    /// Programs run by this agent so far this episode (including this one).
    pub iteration: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NextProgram {
    pub program: Program,
    /// Ticks the agent stands idle before the program starts.
    pub idle_ticks: u64,
}

/// Final state reported to each team after the game.
#[derive(Clone, Debug)]
pub struct PostGameInfo {
    pub team: Team,
    pub episode: u32,
    pub own_score: u32,
    pub opponent_score: u32,
    /// Event log per own agent.
    pub logs: Vec<(String, Vec<Event>)>,
    /// Status of each own agent's last program.
    pub final_status: Vec<(String, ExecStatus)>,
}

/// One language-model call, as reported for latency statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LlmCallRecord {
    pub purpose: String,
    pub agent: Option<String>,
    /// Response time in seconds.
    pub t_resp: f64,
    /// Output tokens.
    pub n_out: u32,
    #[serde(default)]
    pub prompt: String,
    #[serde(default)]
    pub response: String,
}

/// A team's decision maker. Objects persist between episodes.
pub trait TeamSystem: Send {
    fn name(&self) -> String;

    /// Returns one program per agent in `info.agents`; missing entries idle.
    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program>;

    /// Called when an agent's program ends; `None` leaves the agent idle.
    fn on_program_end(&mut self, end: &ProgramEnd<'_>) -> Option<NextProgram>;

    fn post_game(&mut self, info: &PostGameInfo);

    /// Drains model-call records made since the last call.
    fn take_llm_records(&mut self) -> Vec<LlmCallRecord> {
        Vec::new()
    }

    /// Serialized persistent state, for systems that have any.
    fn checkpoint(&self) -> Option<String> {
        None
    }
}
