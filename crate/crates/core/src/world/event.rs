use serde::{Deserialize, Serialize};

use super::types::{Inventory, Position};

/// Sender name used for messages the environment itself emits.
pub const ENVIRONMENT: &str = "environment";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Chat,
    Observe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Chat { text: String },
    Observe { observation: Box<Observation> },
}

/// A chat message (public) or an observe snapshot (private to `sender`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub sender: String,
    pub payload: Payload,
}

impl Event {
    pub fn chat(tick: u64, sender: &str, text: impl Into<String>) -> Self {
        Self {
            tick,
            sender: sender.to_string(),
            payload: Payload::Chat { text: text.into() },
        }
    }

    pub fn observe(tick: u64, sender: &str, observation: Observation) -> Self {
        Self {
            tick,
            sender: sender.to_string(),
            payload: Payload::Observe {
                observation: Box::new(observation),
            },
        }
    }

    pub fn kind(&self) -> EventKind {
        match self.payload {
            Payload::Chat { .. } => EventKind::Chat,
            Payload::Observe { .. } => EventKind::Observe,
        }
    }

    pub fn chat_text(&self) -> Option<&str> {
        match &self.payload {
            Payload::Chat { text } => Some(text),
            Payload::Observe { .. } => None,
        }
    }

    pub fn observation(&self) -> Option<&Observation> {
        match &self.payload {
            Payload::Observe { observation } => Some(observation),
            Payload::Chat { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearbyBlock {
    pub kind: String,
    pub position: Position,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearbyMob {
    pub kind: String,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChestContents {
    pub position: Position,
    pub items: Inventory,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelfStatus {
    pub health: u8,
    pub hunger: u8,
    pub position: Position,
    pub velocity: [f64; 3],
    pub direction: String,
    pub equipment: Option<String>,
    pub biome: String,
    /// In-game time of day, in ticks.
    pub time: u64,
    pub inventory_used: u32,
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub nearby_blocks: Vec<NearbyBlock>,
    pub nearby_mobs: Vec<NearbyMob>,
    pub chest_contents: Vec<ChestContents>,
    pub inventory: Inventory,
    pub self_status: SelfStatus,
}
