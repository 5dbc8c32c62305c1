//! Built-in scripted opponents, the idle team and the random baseline.
//!
//! Scripts are ActScript templates shipped as assets. Placeholders of the form
//! `{{key}}` are filled from the scenario's public constants (see
//! [`Scenario::constants`]) plus `self` and `mate`, the agent's own and its
//! teammate's names. Built-ins never adapt: a script that stops is not
//! restarted.

mod random;

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::actionlang::{parse_source, validate, ParseError, Program};
use crate::scenarios::{Scenario, ScenarioKind};
use crate::team::{NextProgram, PostGameInfo, PreGameInfo, ProgramEnd, TeamSystem};

pub use random::{random_program, RandomPolicyState, RandomTeam, RANDOM_ATTEMPTS};

pub const DO_NOTHING: &str = "do_nothing";

#[derive(Debug, Error)]
pub enum OpponentError {
    #[error("unknown opponent `{name}` for {scenario}")]
    Unknown { name: String, scenario: &'static str },
    #[error("opponent asset: {0}")]
    Asset(#[from] toml::de::Error),
    #[error("unknown template key `{{{{{0}}}}}`")]
    Template(String),
    #[error("unterminated template placeholder")]
    Unterminated,
    #[error("script for {agent}: {source}")]
    Parse {
        agent: String,
        #[source]
        source: ParseError,
    },
    #[error("script for {agent}: {issue}")]
    Invalid { agent: String, issue: String },
    #[error("{name} has {scripts} scripts for {agents} agents")]
    AgentCount { name: String, scripts: usize, agents: usize },
}

/// Mushroom War sabotage switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SabotageFlags {
    /// Break the opposing team's mushroom blocks.
    pub destroy: bool,
    /// Place slime blocks in the opposing area.
    pub place: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleScript {
    pub role: String,
    pub script: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpponentSpec {
    pub name: String,
    pub scenario: ScenarioKind,
    pub summary: String,
    /// Mushroom War only.
    #[serde(default)]
    pub sabotage: Option<SabotageFlags>,
    /// Dash & Dine only: `(source crop, target crop)` farm conversions.
    #[serde(default)]
    pub transforms: Vec<(String, String)>,
    /// Dash & Dine only: food types handed in, in locking order.
    #[serde(default)]
    pub foods: Vec<String>,
    /// One script per team agent, in layout order.
    pub agents: Vec<RoleScript>,
}

const ASSETS: &[(ScenarioKind, &str, &str)] = &[
    (ScenarioKind::MushroomWar, "aggressive", include_str!("../../assets/opponents/mw_aggressive.toml")),
    (ScenarioKind::MushroomWar, "balanced", include_str!("../../assets/opponents/mw_balanced.toml")),
    (ScenarioKind::MushroomWar, "passive", include_str!("../../assets/opponents/mw_passive.toml")),
    (ScenarioKind::MushroomWar, "slimy", include_str!("../../assets/opponents/mw_slimy.toml")),
    (ScenarioKind::DashAndDine, "berries", include_str!("../../assets/opponents/dd_berries.toml")),
    (ScenarioKind::DashAndDine, "cake_beetroot", include_str!("../../assets/opponents/dd_cake_beetroot.toml")),
    (ScenarioKind::DashAndDine, "melon_pumpkin", include_str!("../../assets/opponents/dd_melon_pumpkin.toml")),
    (ScenarioKind::DashAndDine, "potato_cookie", include_str!("../../assets/opponents/dd_potato_cookie.toml")),
];

/// Built-in opponent names for a scenario, `do_nothing` first.
pub fn names(scenario: ScenarioKind) -> Vec<&'static str> {
    std::iter::once(DO_NOTHING)
        .chain(ASSETS.iter().filter(|a| a.0 == scenario).map(|a| a.1))
        .collect()
}

/// The active (non-idle) built-ins for a scenario.
pub fn active_names(scenario: ScenarioKind) -> Vec<&'static str> {
    names(scenario).into_iter().filter(|n| *n != DO_NOTHING).collect()
}

/// Raw asset text of a scripted built-in.
pub fn source(name: &str, scenario: ScenarioKind) -> Option<&'static str> {
    ASSETS
        .iter()
        .find(|a| a.0 == scenario && a.1 == name)
        .map(|a| a.2)
}

pub fn do_nothing(scenario: ScenarioKind) -> OpponentSpec {
    let idle = RoleScript {
        role: "idle".to_string(),
        script: "loop { wait(20) }".to_string(),
    };
    OpponentSpec {
        name: DO_NOTHING.to_string(),
        scenario,
        summary: "Both agents wait for the whole game.".to_string(),
        sabotage: (scenario == ScenarioKind::MushroomWar).then(SabotageFlags::default),
        transforms: Vec::new(),
        foods: Vec::new(),
        agents: vec![idle.clone(), idle],
    }
}

pub fn builtin(name: &str, scenario: ScenarioKind) -> Result<OpponentSpec, OpponentError> {
    if name == DO_NOTHING {
        return Ok(do_nothing(scenario));
    }
    let text = source(name, scenario).ok_or_else(|| OpponentError::Unknown {
        name: name.to_string(),
        scenario: scenario.id(),
    })?;
    Ok(toml::from_str(text)?)
}

/// Fills `{{key}}` placeholders from `vars`.
pub fn render(template: &str, vars: &BTreeMap<String, String>) -> Result<String, OpponentError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find("}}").ok_or(OpponentError::Unterminated)?;
        let key = after[..end].trim();
        let value = vars
            .get(key)
            .ok_or_else(|| OpponentError::Template(key.to_string()))?;
        out.push_str(value);
        rest = &after[end + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Template variables for `agent` on a team with players `agents`.
pub fn template_vars(
    constants: &BTreeMap<String, String>,
    agents: &[String],
    agent: usize,
) -> BTreeMap<String, String> {
    let mut vars = constants.clone();
    vars.insert("self".into(), agents[agent].clone());
    if let Some(mate) = agents.iter().enumerate().find(|(k, _)| *k != agent) {
        vars.insert("mate".into(), mate.1.clone());
    }
    vars
}

impl OpponentSpec {
    /// Renders, parses and validates every script for one side.
    pub fn programs(
        &self,
        scenario: &Scenario,
        agents: &[String],
        constants: &BTreeMap<String, String>,
    ) -> Result<Vec<Program>, OpponentError> {
        if self.agents.len() != agents.len() {
            return Err(OpponentError::AgentCount {
                name: self.name.clone(),
                scripts: self.agents.len(),
                agents: agents.len(),
            });
        }
        self.agents
            .iter()
            .enumerate()
            .map(|(k, role)| {
                let agent = agents[k].clone();
                let text = render(&role.script, &template_vars(constants, agents, k))?;
                let program = parse_source(&text).map_err(|source| OpponentError::Parse {
                    agent: agent.clone(),
                    source,
                })?;
                if let Some(issue) = validate(&program, &scenario.primitives).into_iter().next() {
                    return Err(OpponentError::Invalid {
                        agent,
                        issue: issue.to_string(),
                    });
                }
                Ok(program)
            })
            .collect()
    }
}

/// Team system running a built-in script per agent.
#[derive(Clone, Debug)]
pub struct BuiltinTeam {
    spec: OpponentSpec,
    scenario: std::sync::Arc<Scenario>,
}

impl BuiltinTeam {
    pub fn new(spec: OpponentSpec, scenario: std::sync::Arc<Scenario>) -> Self {
        Self { spec, scenario }
    }

    pub fn named(name: &str, scenario: std::sync::Arc<Scenario>) -> Result<Self, OpponentError> {
        let spec = builtin(name, scenario.kind())?;
        Ok(Self::new(spec, scenario))
    }

    pub fn spec(&self) -> &OpponentSpec {
        &self.spec
    }
}

impl TeamSystem for BuiltinTeam {
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program> {
        self.spec
            .programs(&self.scenario, &info.agents, &info.constants)
            .expect("built-in scripts are checked by tests")
    }

    fn on_program_end(&mut self, _end: &ProgramEnd<'_>) -> Option<NextProgram> {
        None
    }

    fn post_game(&mut self, _info: &PostGameInfo) {}
}

/// Fixed programs per agent name; unnamed agents idle. For tests and demos.
#[derive(Clone, Debug, Default)]
pub struct ScriptedTeam {
    pub name: String,
    pub programs: BTreeMap<String, Program>,
    /// Programs handed out, in order, whenever any agent's program ends.
    pub follow_ups: Vec<Program>,
    pub ends_seen: Vec<(String, u64)>,
}

impl ScriptedTeam {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    /// Adds a program parsed from `source`; panics on invalid source.
    pub fn with(mut self, agent: &str, source: &str) -> Self {
        let program = parse_source(source).expect("scripted program parses");
        self.programs.insert(agent.to_string(), program);
        self
    }
}

impl TeamSystem for ScriptedTeam {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program> {
        info.agents
            .iter()
            .map(|a| self.programs.get(a).cloned().unwrap_or_else(|| Program::new(Vec::new())))
            .collect()
    }

    fn on_program_end(&mut self, end: &ProgramEnd<'_>) -> Option<NextProgram> {
        self.ends_seen.push((end.agent.to_string(), end.tick));
        if self.follow_ups.is_empty() {
            return None;
        }
        Some(NextProgram {
            program: self.follow_ups.remove(0),
            idle_ticks: 0,
        })
    }

    fn post_game(&mut self, _info: &PostGameInfo) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Team;

    #[test]
    fn every_builtin_renders_and_validates() {
        for kind in ScenarioKind::ALL {
            let scenario = Scenario::builtin(kind);
            for team in [Team::Red, Team::Blue] {
                let agents = scenario.players(team);
                let constants = scenario.constants(team);
                for name in names(kind) {
                    let spec = builtin(name, kind).unwrap();
                    assert_eq!(spec.scenario, kind, "{name}");
                    assert_eq!(spec.agents.len(), 2, "{name}");
                    spec.programs(&scenario, &agents, &constants)
                        .unwrap_or_else(|e| panic!("{name}: {e}"));
                }
            }
        }
    }

    #[test]
    fn mushroom_war_flags() {
        let flags = |n| builtin(n, ScenarioKind::MushroomWar).unwrap().sabotage.unwrap();
        assert_eq!(flags("aggressive"), SabotageFlags { destroy: true, place: true });
        assert_eq!(flags("balanced"), SabotageFlags { destroy: true, place: false });
        assert_eq!(flags("passive"), SabotageFlags { destroy: false, place: false });
        assert_eq!(flags("slimy"), SabotageFlags { destroy: false, place: true });
    }

    #[test]
    fn dash_and_dine_transforms() {
        let t = |n| builtin(n, ScenarioKind::DashAndDine).unwrap().transforms;
        assert!(t("melon_pumpkin").is_empty());
        assert_eq!(t("berries").len(), 2);
        assert!(t("potato_cookie").contains(&("sweet_berry_bush".into(), "potatoes".into())));
    }

    #[test]
    fn unknown_name_errors() {
        assert!(matches!(
            builtin("slimy", ScenarioKind::DashAndDine),
            Err(OpponentError::Unknown { .. })
        ));
    }

    #[test]
    fn render_placeholders() {
        let vars: BTreeMap<String, String> = [("own.center".to_string(), "1, 0, 2".to_string())].into();
        assert_eq!(render("moveTo({{own.center}})", &vars).unwrap(), "moveTo(1, 0, 2)");
        assert!(matches!(render("{{nope}}", &vars), Err(OpponentError::Template(_))));
        assert!(matches!(render("{{own", &vars), Err(OpponentError::Unterminated)));
    }
}
