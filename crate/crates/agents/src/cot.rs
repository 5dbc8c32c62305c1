//! Single-prompt baseline: one chain-of-thought call writes every agent's
//! program before the game, with no regeneration during play.

use arena_core::actionlang::{pretty, ExecStatus, Program};
use arena_core::team::{LlmCallRecord, NextProgram, PostGameInfo, PreGameInfo, ProgramEnd, TeamSystem};

use crate::code::{agent_programs, compile};
use crate::description::GameDescription;
use crate::history::{self, dedup_events, render_chat, select_longest_log};
use crate::llm::{LlmSession, Purpose};
use crate::prompts::{PromptTemplates, TemplateId};

pub const SYSTEM_NAME: &str = "cot";

#[derive(Clone, Debug, Default)]
struct LastGame {
    programs: Vec<(String, String)>,
    errors: Vec<(String, String)>,
    chat: String,
}

pub struct CotTeam {
    session: LlmSession,
    templates: PromptTemplates,
    pub history_lines: usize,
    last: Option<LastGame>,
    programs: Vec<(String, String)>,
}

impl CotTeam {
    pub fn new(session: LlmSession, templates: PromptTemplates) -> Self {
        let session = if session.system_prompt.is_empty() {
            session.with_system_prompt(templates.system.clone())
        } else {
            session
        };
        Self { session, templates, history_lines: 80, last: None, programs: Vec::new() }
    }

    fn prompt(&self, d: &GameDescription, info: &PreGameInfo) -> String {
        let observation = info
            .agents
            .iter()
            .zip(&info.observations)
            .map(|(a, o)| {
                format!("{a}: nearby blocks: {}; nearby entities: {}", history::render_blocks(o), history::render_mobs(o))
            })
            .collect::<Vec<_>>()
            .join("\n");
        let (programs, errors, chat) = match &self.last {
            None => ("(first game)".to_string(), "(first game)".to_string(), "(first game)".to_string()),
            Some(l) => (
                l.programs.iter().map(|(a, p)| format!("{a}:\n{p}")).collect::<Vec<_>>().join("\n"),
                if l.errors.is_empty() {
                    "(none)".into()
                } else {
                    l.errors.iter().map(|(a, e)| format!("{a}: {e}")).collect::<Vec<_>>().join("\n")
                },
                l.chat.clone(),
            ),
        };
        self.templates
            .fill(
                TemplateId::Cot,
                &[
                    ("description", &d.render()),
                    ("observation", &observation),
                    ("previous_programs", &programs),
                    ("errors", &errors),
                    ("history", &chat),
                    ("actscript", &d.actscript()),
                    ("agents", &d.agents.join(", ")),
                ],
            )
            .expect("cot template slots")
    }
}

impl TeamSystem for CotTeam {
    fn name(&self) -> String {
        SYSTEM_NAME.into()
    }

    fn pre_game(&mut self, info: &PreGameInfo) -> Vec<Program> {
        let d = GameDescription::from_info(info);
        let prompt = self.prompt(&d, info);
        let blocks = match self.session.ask(Purpose::Cot, None, prompt, &d.hints()) {
            Ok(r) => agent_programs(&r.text),
            Err(e) => {
                log::warn!("cot call failed: {e}");
                Vec::new()
            }
        };
        let programs: Vec<Program> = info
            .agents
            .iter()
            .map(|agent| {
                let source = blocks.iter().find(|(a, _)| a == agent).map(|(_, s)| s.as_str());
                match source.map(|s| compile(s, &d.primitives)) {
                    Some(Ok(p)) => p,
                    Some(Err(e)) => {
                        log::warn!("{agent}: unusable program ({e}); idling");
                        Program::wait_loop()
                    }
                    None => {
                        log::warn!("{agent}: no program in the response; idling");
                        Program::wait_loop()
                    }
                }
            })
            .collect();
        self.programs = info.agents.iter().cloned().zip(programs.iter().map(pretty)).collect();
        programs
    }

    fn on_program_end(&mut self, _end: &ProgramEnd<'_>) -> Option<NextProgram> {
        None
    }

    fn post_game(&mut self, info: &PostGameInfo) {
        let errors = info
            .final_status
            .iter()
            .filter_map(|(a, s)| match s {
                ExecStatus::Error(e) => Some((a.clone(), e.clone())),
                _ => None,
            })
            .collect();
        let chat = match select_longest_log(&info.logs) {
            Some(i) => render_chat(&dedup_events(&info.logs[i].1), self.history_lines),
            None => "(no messages)".into(),
        };
        self.last = Some(LastGame { programs: std::mem::take(&mut self.programs), errors, chat });
    }

    fn take_llm_records(&mut self) -> Vec<LlmCallRecord> {
        self.session.take_records()
    }
}
