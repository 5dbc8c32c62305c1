//! The tactics team: a shared plan, a causal model and an opponent model
//! updated between games, and one code-writing agent per player.

use std::collections::BTreeMap;

use arena_core::actionlang::{pretty, ExecStatus, Program};
use arena_core::team::{LlmCallRecord, NextProgram, PostGameInfo, PreGameInfo, ProgramEnd, TeamSystem};
use arena_core::world::{Event, Observation, TICKS_PER_SECOND};
use serde::{Deserialize, Serialize};

use crate::causal::{parse_relations, CausalGraph, CausalRelation};
use crate::checkpoint::{Checkpoint, CHECKPOINT_VERSION};
use crate::code::{compile, extract_code};
use crate::description::GameDescription;
use crate::history::{self, chats_from, dedup_events, render_chat, select_longest_log};
use crate::llm::{rule_hints as hint, LlmSession, Purpose};
use crate::prompts::{PromptTemplates, TemplateId};
use crate::tactics::{parse_tactics, OpponentTactics, Tactics};

/// Name this system reports to the harness.
pub const SYSTEM_NAME: &str = "tactics";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeamSettings {
    /// Programs per agent per episode; past this the agent idles.
    pub max_iterations: u32,
    /// Consecutive unusable programs before the agent gives up for the episode.
    pub max_parse_failures: u32,
    /// Chat lines kept when rendering a log into a prompt.
    pub history_lines: usize,
    /// Convert generation latency into idle ticks before a regenerated program starts.
    pub charge_latency: bool,
}

impl Default for TeamSettings {
    fn default() -> Self {
        Self { max_iterations: 50, max_parse_failures: 3, history_lines: 80, charge_latency: true }
    }
}

/// Idle ticks charged for a model response time: `round(seconds × 20)`.
pub fn latency_ticks(seconds: f64) -> u64 {
    (seconds.max(0.0) * TICKS_PER_SECOND as f64).round() as u64
}

#[derive(Clone, Debug, Default)]
struct AgentState {
    given_up: bool,
}

pub struct TacticsTeam {
    session: LlmSession,
    templates: PromptTemplates,
    pub settings: TeamSettings,
    episode: u32,
    tactics: Option<Tactics>,
    graph: CausalGraph,
    opponent: OpponentTactics,
    game: Option<GameDescription>,
    agents: BTreeMap<String, AgentState>,
    /// Idle ticks charged this episode, per agent.
    charged: BTreeMap<String, u64>,
}

impl TacticsTeam {
    pub fn new(session: LlmSession, templates: PromptTemplates) -> Self {
        Self::from_checkpoint(session, templates, Checkpoint::fresh())
    }

    pub fn from_checkpoint(session: LlmSession, templates: PromptTemplates, cp: Checkpoint) -> Self {
        let session = if session.system_prompt.is_empty() {
            session.with_system_prompt(templates.system.clone())
        } else {
            session
        };
        Self {
            session,
            templates,
            settings: TeamSettings::default(),
            episode: cp.episode,
            tactics: cp.tactics,
            graph: cp.graph,
            opponent: cp.opponent,
            game: None,
            agents: BTreeMap::new(),
            charged: BTreeMap::new(),
        }
    }

    pub fn with_settings(mut self, settings: TeamSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn tactics(&self) -> Option<&Tactics> {
        self.tactics.as_ref()
    }

    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn opponent(&self) -> &OpponentTactics {
        &self.opponent
    }

    pub fn episodes_played(&self) -> u32 {
        self.episode
    }

    /// Idle ticks charged to each agent in the current (or last) episode.
    pub fn charged_ticks(&self) -> &BTreeMap<String, u64> {
        &self.charged
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            episode: self.episode,
            tactics: self.tactics.clone(),
            opponent: self.opponent.clone(),
            graph: self.graph.clone(),
        }
    }

    fn ask(
        &mut self,
        purpose: Purpose,
        agent: Option<&str>,
        prompt: String,
        extra: &[(&str, String)],
    ) -> Option<(String, f64)> {
        let mut hints = self.game.as_ref().map(GameDescription::hints).unwrap_or_default();
        for (k, v) in extra {
            hints.insert(k.to_string(), v.clone());
        }
        match self.session.ask(purpose, agent, prompt, &hints) {
            Ok(r) => Some((r.text, r.latency)),
            Err(e) => {
                log::warn!("{purpose} call failed: {e}");
                None
            }
        }
    }

    fn fill(&self, id: TemplateId, values: &[(&str, &str)]) -> String {
        self.templates
            .fill(id, values)
            .unwrap_or_else(|e| panic!("prompt template {}: {e}", id.key()))
    }

    /// Asks up to twice and returns the first response `parse` accepts.
    fn ask_parsed<T>(
        &mut self,
        purpose: Purpose,
        prompt: String,
        extra: &[(&str, String)],
        parse: impl Fn(&str) -> Option<T>,
    ) -> Option<T> {
        for attempt in 0..2 {
            if let Some((text, _)) = self.ask(purpose, None, prompt.clone(), extra) {
                if let Some(v) = parse(&text) {
                    return Some(v);
                }
                log::warn!("{purpose}: unusable response (attempt {})", attempt + 1);
            }
        }
        None
    }

    fn description(&self) -> &GameDescription {
        self.game.as_ref().expect("pre_game ran")
    }

    fn tactics_text(&self) -> String {
        self.tactics.as_ref().map_or_else(|| "(none yet)".into(), Tactics::to_string)
    }

    pub fn causal_init(&mut self) {
        let d = self.description();
        let prompt = self.fill(
            TemplateId::CausalInit,
            &[("description", &d.render()), ("primitives", &d.primitives.docs())],
        );
        let rels = self.ask_parsed(Purpose::CausalInit, prompt, &[], |t| parse_relations(t).ok());
        self.graph.union(own_relations(rels.unwrap_or_default()));
        let table = self.description().primitives.clone();
        self.graph.ensure_coverage(&table);
    }

    pub fn tactics_init(&mut self) {
        let d = self.description().render();
        let prompt = self.fill(TemplateId::TacticsInit, &[("description", &d), ("causal_graph", &self.graph.render())]);
        let parsed = self.ask_parsed(Purpose::TacticsInit, prompt, &[], |t| parse_tactics(t).ok());
        self.tactics = Some(parsed.unwrap_or_else(Tactics::fallback));
    }

    pub fn causal_update(&mut self, logs: &[(String, Vec<Event>)]) {
        let d = self.description().render();
        let pairs = history::message_inventory_pairs(logs, self.settings.history_lines);
        let prompt = self.fill(
            TemplateId::CausalUpdate,
            &[("description", &d), ("causal_graph", &self.graph.render()), ("history", &pairs)],
        );
        let team_chat = own_chat(logs, self.settings.history_lines);
        let rels = self.ask_parsed(Purpose::CausalUpdate, prompt, &[(hint::TEAM_CHAT, team_chat)], |t| {
            parse_relations(t).ok()
        });
        if let Some(rels) = rels {
            self.graph.union(own_relations(rels));
        }
    }

    pub fn opponent_update(&mut self, logs: &[(String, Vec<Event>)]) {
        let Some(longest) = select_longest_log(logs) else { return };
        let log = dedup_events(&logs[longest].1);
        let opp = chats_from(&log, &self.description().opponents);
        if opp.is_empty() {
            return;
        }
        let chat = render_chat(opp, self.settings.history_lines);
        let d = self.description().render();
        let prompt = self.fill(
            TemplateId::OpponentUpdate,
            &[
                ("description", &d),
                ("opponent_tactics", &self.opponent.to_string()),
                ("causal_graph", &self.graph.render()),
                ("opponent_chat", &chat),
            ],
        );
        if let Some(o) =
            self.ask_parsed(Purpose::OpponentUpdate, prompt, &[(hint::OPPONENT_CHAT, chat.clone())], |t| {
                OpponentTactics::parse(t).ok()
            })
        {
            self.opponent = o;
        }
    }

    pub fn tactics_update(&mut self, info: &PostGameInfo) {
        let d = self.description().render();
        let view = history::team_view(&info.logs, self.settings.history_lines);
        let prompt = self.fill(
            TemplateId::TacticsUpdate,
            &[
                ("description", &d),
                ("tactics", &self.tactics_text()),
                ("history", &view),
                ("causal_graph", &self.graph.render()),
                ("opponent_tactics", &self.opponent.to_string()),
                ("own_score", &info.own_score.to_string()),
                ("opponent_score", &info.opponent_score.to_string()),
            ],
        );
        match self.ask_parsed(Purpose::TacticsUpdate, prompt, &[], |t| parse_tactics(t).ok()) {
            Some(t) => self.tactics = Some(t),
            None if self.tactics.is_none() => self.tactics = Some(Tactics::fallback()),
            None => {}
        }
    }

    fn critique(&mut self, end: &ProgramEnd<'_>) -> String {
        let status = status_text(end.status);
        let d = self.description().render();
        let view = history::agent_view(end.events, end.observation, self.settings.history_lines);
        let prompt = self.fill(
            TemplateId::Critic,
            &[
                ("description", &d),
                ("tactics", &self.tactics_text()),
                ("agent", end.agent),
                ("program", &pretty(end.program)),
                ("status", &status),
                ("history", &view),
            ],
        );
        self.ask(Purpose::Critic, Some(end.agent), prompt, &[(hint::STATUS, status)])
            .map_or_else(|| "(no critique available)".into(), |(t, _)| t.trim().to_string())
    }

    /// Writes a program for `agent`, retrying on unusable output.
    /// Returns the program and the summed generation latency.
    fn generate(
        &mut self,
        agent: &str,
        view: &str,
        critique: &str,
        previous: &str,
        error: &str,
    ) -> (Program, f64) {
        let d = self.description();
        let (desc, actscript, table) = (d.render(), d.actscript(), d.primitives.clone());
        let mut error = error.to_string();
        let mut latency = 0.0;
        for _ in 0..self.settings.max_parse_failures {
            let prompt = self.fill(
                TemplateId::Action,
                &[
                    ("description", &desc),
                    ("agent", agent),
                    ("tactics", &self.tactics_text()),
                    ("actscript", &actscript),
                    ("history", view),
                    ("previous_program", previous),
                    ("error", &error),
                    ("critique", critique),
                ],
            );
            let Some((text, t)) = self.ask(Purpose::Action, Some(agent), prompt, &[]) else {
                continue;
            };
            latency += t;
            match compile(extract_code(&text), &table) {
                Ok(p) => return (p, latency),
                Err(e) => error = format!("the last answer could not be used: {e}"),
            }
        }
        log::warn!("{agent}: no usable program; idling for the rest of the episode");
        self.agents.entry(agent.to_string()).or_default().given_up = true;
        (Program::wait_loop(), latency)
    }
}

fn status_text(status: &ExecStatus) -> String {
    match status {
        ExecStatus::Running => "still running".into(),
        ExecStatus::Done => "finished without errors".into(),
        ExecStatus::Error(e) => format!("stopped with an error: {e}"),
    }
}

/// Relations written by the model must be single ActScript calls.
fn own_relations(rels: Vec<CausalRelation>) -> Vec<CausalRelation> {
    rels.into_iter().filter(CausalRelation::is_single_call).collect()
}

/// Each member's own chat lines, newline-separated.
fn own_chat(logs: &[(String, Vec<Event>)], max: usize) -> String {
    logs.iter()
        .map(|(name, log)| render_chat(chats_from(&dedup_events(log), std::slice::from_ref(name)), max))
        .collect::<Vec<_>>()
        .join("\n")
}

fn initial_view(obs: Option<&Observation>) -> String {
    match obs {
        Some(o) => format!("Chat log:\n(no messages)\n\nCurrent state:\n{}", history::render_observation(o)),
        None => "(nothing yet)".into(),
    }
}

impl TeamSystem for TacticsTeam {
    fn name(&self) -> String {
        SYSTEM_NAME.into()
    }

    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program> {
        self.game = Some(GameDescription::from_info(info));
        self.agents = info.agents.iter().map(|a| (a.clone(), AgentState::default())).collect();
        self.charged = info.agents.iter().map(|a| (a.clone(), 0)).collect();
        if self.graph.is_empty() {
            self.causal_init();
        }
        if self.tactics.is_none() {
            self.tactics_init();
        }
        info.agents
            .iter()
            .enumerate()
            .map(|(k, agent)| {
                let view = initial_view(info.observations.get(k));
                self.generate(agent, &view, "(first program)", "(none)", "(none)").0
            })
            .collect()
    }

    fn on_program_end(&mut self, end: &ProgramEnd<'_>) -> Option<NextProgram> {
        let state = self.agents.get(end.agent)?;
        if state.given_up || end.iteration >= self.settings.max_iterations {
            return None;
        }
        let critique = self.critique(end);
        let view = history::agent_view(end.events, end.observation, self.settings.history_lines);
        let (program, latency) =
            self.generate(end.agent, &view, &critique, &pretty(end.program), &status_text(end.status));
        let idle_ticks = if self.settings.charge_latency { latency_ticks(latency) } else { 0 };
        *self.charged.entry(end.agent.to_string()).or_default() += idle_ticks;
        Some(NextProgram { program, idle_ticks })
    }

    fn post_game(&mut self, info: &PostGameInfo) {
        if self.game.is_none() {
            return;
        }
        self.causal_update(&info.logs);
        self.opponent_update(&info.logs);
        self.tactics_update(info);
        self.episode += 1;
    }

    fn take_llm_records(&mut self) -> Vec<LlmCallRecord> {
        self.session.take_records()
    }

    fn checkpoint(&self) -> Option<String> {
        Some(self.to_checkpoint().to_json())
    }
}
