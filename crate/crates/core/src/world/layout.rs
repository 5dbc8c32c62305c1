//! Scenario layout documents.
//!
//! A layout is a TOML document describing the flat arena: its bounds, the two
//! team areas, block patches, agent start positions, mobs, chests and named
//! anchor points that scripted opponents refer to.
//!
//! ```toml
//! schema = 1
//! name = "tiny"
//! width = 8
//! depth = 4
//!
//! [[areas]]
//! team = "red"
//! x = [0, 3]
//! z = [0, 3]
//!
//! [[blocks]]
//! kind = "slime_block"
//! x = 1
//! z = 1
//! w = 2
//! regrow = true
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{AgentRole, Block, Position, Team};

pub const LAYOUT_SCHEMA: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("layout parse error: {0}")]
    Parse(String),
    #[error("unsupported layout schema {found} (expected {LAYOUT_SCHEMA})")]
    Schema { found: u32 },
    #[error("{what} at {position} lies outside the {width}x{depth} arena")]
    OutOfBounds {
        what: String,
        position: Position,
        width: i32,
        depth: i32,
    },
    #[error("cell {position} is defined more than once")]
    Overlap { position: Position },
    #[error("unknown block kind `{kind}` at {position}")]
    UnknownBlock { kind: String, position: Position },
    #[error("no area defined for team {0}")]
    MissingArea(Team),
    #[error("team areas overlap at {position}")]
    AreaOverlap { position: Position },
    #[error("agent name `{0}` is used twice")]
    DuplicateAgent(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaSpec {
    pub team: Team,
    pub x: [i32; 2],
    pub z: [i32; 2],
}

impl AreaSpec {
    pub fn contains(&self, p: Position) -> bool {
        (self.x[0]..=self.x[1]).contains(&p.x) && (self.z[0]..=self.z[1]).contains(&p.z)
    }

    pub fn center(&self) -> Position {
        Position::flat((self.x[0] + self.x[1]) / 2, (self.z[0] + self.z[1]) / 2)
    }
}

fn one() -> i32 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub kind: String,
    pub x: i32,
    pub z: i32,
    #[serde(default = "one")]
    pub w: i32,
    #[serde(default = "one")]
    pub d: i32,
    /// Growth stage for crops; defaults to mature.
    #[serde(default)]
    pub stage: Option<u8>,
    /// Cells regrow their original block after removal.
    #[serde(default)]
    pub regrow: bool,
}

impl BlockSpec {
    pub fn cells(&self) -> impl Iterator<Item = Position> + '_ {
        (self.x..self.x + self.w)
            .flat_map(move |x| (self.z..self.z + self.d).map(move |z| Position::flat(x, z)))
    }
}

fn player() -> AgentRole {
    AgentRole::Player
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub name: String,
    pub team: Team,
    pub x: i32,
    pub z: i32,
    #[serde(default = "player")]
    pub role: AgentRole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobSpec {
    pub kind: String,
    pub x: i32,
    pub z: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChestSpec {
    pub x: i32,
    pub z: i32,
    #[serde(default)]
    pub items: BTreeMap<String, u32>,
}

/// A named point substituted into scripted opponent templates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorSpec {
    pub team: Team,
    pub name: String,
    pub x: i32,
    pub z: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub schema: u32,
    pub name: String,
    pub width: i32,
    pub depth: i32,
    pub areas: Vec<AreaSpec>,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub mobs: Vec<MobSpec>,
    #[serde(default)]
    pub chests: Vec<ChestSpec>,
    #[serde(default)]
    pub anchors: Vec<AnchorSpec>,
}

impl Layout {
    pub fn from_toml(text: &str) -> Result<Self, LayoutError> {
        let layout: Layout = toml::from_str(text).map_err(|e| LayoutError::Parse(e.to_string()))?;
        layout.validate()?;
        Ok(layout)
    }

    pub fn in_bounds(&self, p: Position) -> bool {
        p.y == 0 && (0..self.width).contains(&p.x) && (0..self.depth).contains(&p.z)
    }

    pub fn area(&self, team: Team) -> Option<&AreaSpec> {
        self.areas.iter().find(|a| a.team == team)
    }

    pub fn area_of(&self, p: Position) -> Option<Team> {
        self.areas.iter().find(|a| a.contains(p)).map(|a| a.team)
    }

    pub fn anchor(&self, team: Team, name: &str) -> Option<Position> {
        self.anchors
            .iter()
            .find(|a| a.team == team && a.name == name)
            .map(|a| Position::flat(a.x, a.z))
    }

    fn check_bounds(&self, what: &str, p: Position) -> Result<(), LayoutError> {
        if self.in_bounds(p) {
            Ok(())
        } else {
            Err(LayoutError::OutOfBounds {
                what: what.to_string(),
                position: p,
                width: self.width,
                depth: self.depth,
            })
        }
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        if self.schema != LAYOUT_SCHEMA {
            return Err(LayoutError::Schema { found: self.schema });
        }
        for team in Team::ALL {
            let area = self.area(team).ok_or(LayoutError::MissingArea(team))?;
            self.check_bounds("area corner", Position::flat(area.x[0], area.z[0]))?;
            self.check_bounds("area corner", Position::flat(area.x[1], area.z[1]))?;
        }
        let (red, blue) = (self.area(Team::Red).unwrap(), self.area(Team::Blue).unwrap());
        for x in red.x[0]..=red.x[1] {
            for z in red.z[0]..=red.z[1] {
                let p = Position::flat(x, z);
                if blue.contains(p) {
                    return Err(LayoutError::AreaOverlap { position: p });
                }
            }
        }

        let mut occupied = BTreeSet::new();
        for spec in &self.blocks {
            for p in spec.cells() {
                if Block::parse(&spec.kind).is_none() {
                    return Err(LayoutError::UnknownBlock {
                        kind: spec.kind.clone(),
                        position: p,
                    });
                }
                self.check_bounds(&spec.kind, p)?;
                if !occupied.insert(p) {
                    return Err(LayoutError::Overlap { position: p });
                }
            }
        }
        for chest in &self.chests {
            let p = Position::flat(chest.x, chest.z);
            self.check_bounds("chest", p)?;
            if !occupied.insert(p) {
                return Err(LayoutError::Overlap { position: p });
            }
        }

        let mut names = BTreeSet::new();
        for agent in &self.agents {
            self.check_bounds(&format!("agent {}", agent.name), Position::flat(agent.x, agent.z))?;
            if !names.insert(agent.name.as_str()) {
                return Err(LayoutError::DuplicateAgent(agent.name.clone()));
            }
        }
        for mob in &self.mobs {
            self.check_bounds(&mob.kind, Position::flat(mob.x, mob.z))?;
        }
        for anchor in &self.anchors {
            self.check_bounds(&format!("anchor {}", anchor.name), Position::flat(anchor.x, anchor.z))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"
schema = 1
name = "tiny"
width = 10
depth = 4

[[areas]]
team = "red"
x = [0, 3]
z = [0, 3]

[[areas]]
team = "blue"
x = [6, 9]
z = [0, 3]

[[blocks]]
kind = "slime_block"
x = 1
z = 1
w = 2

[[agents]]
name = "Ryn"
team = "red"
x = 0
z = 0
"#;

    #[test]
    fn parses_valid_layout() {
        let layout = Layout::from_toml(TINY).unwrap();
        assert_eq!(layout.blocks[0].cells().count(), 2);
        assert_eq!(layout.area_of(Position::flat(7, 2)), Some(Team::Blue));
        assert_eq!(layout.area_of(Position::flat(4, 2)), None);
    }

    #[test]
    fn rejects_agent_outside_bounds() {
        let text = TINY.replace("x = 0\nz = 0", "x = 40\nz = 0");
        match Layout::from_toml(&text) {
            Err(LayoutError::OutOfBounds { position, .. }) => {
                assert_eq!(position, Position::flat(40, 0))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_overlapping_cells() {
        let text = format!("{TINY}\n[[blocks]]\nkind = \"dirt\"\nx = 2\nz = 1\n");
        assert_eq!(
            Layout::from_toml(&text),
            Err(LayoutError::Overlap {
                position: Position::flat(2, 1)
            })
        );
    }

    #[test]
    fn requires_both_areas() {
        let text = TINY.replace("team = \"blue\"", "team = \"red\"");
        assert!(matches!(
            Layout::from_toml(&text),
            Err(LayoutError::MissingArea(Team::Blue)) | Err(LayoutError::AreaOverlap { .. })
        ));
    }

    #[test]
    fn requires_schema() {
        let text = TINY.replace("schema = 1", "schema = 7");
        assert_eq!(Layout::from_toml(&text), Err(LayoutError::Schema { found: 7 }));
    }
}
