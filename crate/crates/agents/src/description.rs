//! The static game description every prompt starts with.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use arena_core::actionlang::PrimitiveTable;
use arena_core::scenarios::ScenarioKind;
use arena_core::team::PreGameInfo;
use arena_core::world::Team;

use crate::llm::rule_hints as hint;

/// How ActScript looks, for prompts that ask for programs.
pub const ACTSCRIPT_GUIDE: &str = r#"ActScript programs are lists of statements:
- a primitive call, e.g. mineBlock("slime_block", 3)
- repeat 5 { ... }  runs the block 5 times
- loop { ... }      runs the block until the game ends
- if has("coal", 2) { ... } else { ... }   tests the player's inventory
- if ok() { ... }   tests whether the previous primitive achieved anything
- wait(20)          idles for 20 ticks (one second)
- say("text")       posts a chat message
Strings use double quotes, positions are three integers (x, y, z), and // starts a comment."#;

#[derive(Clone, Debug, PartialEq)]
pub struct GameDescription {
    pub scenario: ScenarioKind,
    pub title: String,
    pub description: String,
    pub team: Team,
    pub objective: String,
    pub agents: Vec<String>,
    pub server: Option<String>,
    pub opponents: Vec<String>,
    pub constants: BTreeMap<String, String>,
    pub primitives: PrimitiveTable,
}

impl GameDescription {
    pub fn from_info(info: &PreGameInfo) -> Self {
        let description = if info.description.trim().is_empty() {
            info.title.clone()
        } else {
            info.description.trim().to_string()
        };
        Self {
            scenario: info.scenario,
            title: info.title.clone(),
            description,
            team: info.team,
            objective: info.objective.clone(),
            agents: info.agents.clone(),
            server: info.server.clone(),
            opponents: info.opponents.clone(),
            constants: info.constants.clone(),
            primitives: info.primitives.clone(),
        }
    }

    pub fn team_name(&self) -> String {
        format!("{} team", self.team.title())
    }

    pub fn opponent_team_name(&self) -> String {
        format!("{} team", self.team.opponent().title())
    }

    /// Team, objective, scenario text, players and landmarks.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Game: {}", self.title);
        let _ = writeln!(out, "{}", self.description);
        let _ = writeln!(out, "\nYou are the {}. Team objective: {}", self.team_name(), self.objective);
        let _ = writeln!(out, "Your players: {}", self.agents.join(", "));
        if let Some(server) = &self.server {
            let _ = writeln!(out, "Your server (hand food to it): {server}");
        }
        let _ = writeln!(
            out,
            "Opponents: the {} ({}), whose objective mirrors yours.",
            self.opponent_team_name(),
            self.opponents.join(", ")
        );
        let marks: Vec<String> = self
            .constants
            .iter()
            .filter(|(k, _)| k.starts_with("own.") || k.starts_with("opp."))
            .map(|(k, v)| format!("- {k}: {v}"))
            .collect();
        if !marks.is_empty() {
            let _ = writeln!(out, "Landmarks (own = your area, opp = theirs):\n{}", marks.join("\n"));
        }
        out.trim_end().to_string()
    }

    /// ActScript syntax plus this scenario's primitives.
    pub fn actscript(&self) -> String {
        format!("{ACTSCRIPT_GUIDE}\n\nControl primitives:\n{}", self.primitives.docs())
    }

    /// Structured context for offline clients.
    pub fn hints(&self) -> BTreeMap<String, String> {
        let mut h = BTreeMap::new();
        h.insert(hint::SCENARIO.to_string(), self.scenario.id().to_string());
        h.insert(hint::AGENTS.to_string(), self.agents.join(","));
        if let Some(s) = &self.server {
            h.insert(hint::SERVER.to_string(), s.clone());
        }
        for (k, v) in &self.constants {
            h.insert(format!("{}{k}", hint::CONST_PREFIX), v.clone());
        }
        h
    }
}
