//! Language-model team systems for the arena.
//!
//! [`TacticsTeam`] keeps a numbered team plan, a causal model of what
//! actions need and produce, and a guess at the opponents' plan, all
//! refreshed between games; each player writes, runs and critiques its own
//! ActScript programs during the game. [`CotTeam`] is the single-prompt
//! baseline. Both talk to any [`ChatClient`](llm::ChatClient), including the
//! offline [`MockClient`](llm::MockClient).

pub mod causal;
pub mod checkpoint;
pub mod code;
pub mod cot;
pub mod description;
pub mod history;
pub mod llm;
pub mod prompts;
pub mod tactical;
pub mod tactics;

pub use causal::{CausalGraph, CausalRelation};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use cot::CotTeam;
pub use description::GameDescription;
pub use llm::{ChatClient, HttpClient, LlmSession, MockClient};
pub use prompts::PromptTemplates;
pub use tactical::{TacticsTeam, TeamSettings};
pub use tactics::{OpponentTactics, Tactics};
