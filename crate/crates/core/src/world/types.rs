use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Ticks per simulated second.
pub const TICKS_PER_SECOND: u64 = 20;

/// Integer cell coordinates. Interactable blocks all live on the `y = 0` layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    pub const fn flat(x: i32, z: i32) -> Self {
        Self { x, y: 0, z }
    }

    /// Travel distance in cells (and ticks, at one cell per tick).
    pub fn chebyshev(self, other: Position) -> u64 {
        let dx = (self.x - other.x).unsigned_abs();
        let dy = (self.y - other.y).unsigned_abs();
        let dz = (self.z - other.z).unsigned_abs();
        u64::from(dx.max(dy).max(dz))
    }

    pub fn euclidean(self, other: Position) -> f64 {
        let dx = f64::from(self.x - other.x);
        let dy = f64::from(self.y - other.y);
        let dz = f64::from(self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Team {
    Red,
    Blue,
}

impl Team {
    pub const ALL: [Team; 2] = [Team::Red, Team::Blue];

    pub fn opponent(self) -> Team {
        match self {
            Team::Red => Team::Blue,
            Team::Blue => Team::Red,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Team::Red => 0,
            Team::Blue => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Team::Red => "red",
            Team::Blue => "blue",
        }
    }

    /// Capitalised form used in server names, e.g. `Red_Server`.
    pub fn title(self) -> &'static str {
        match self {
            Team::Red => "Red",
            Team::Blue => "Blue",
        }
    }

    pub fn server_name(self) -> String {
        format!("{}_Server", self.title())
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Crop kinds that grow through stages on soil cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crop {
    Wheat,
    Carrots,
    Potatoes,
    Beetroots,
    Melon,
    Pumpkin,
    SweetBerryBush,
    Cocoa,
    SugarCane,
}

/// What a crop grows on. Farmland needs a hoe to make from dirt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Soil {
    Farmland,
    Dirt,
}

impl Crop {
    pub const ALL: [Crop; 9] = [
        Crop::Wheat,
        Crop::Carrots,
        Crop::Potatoes,
        Crop::Beetroots,
        Crop::Melon,
        Crop::Pumpkin,
        Crop::SweetBerryBush,
        Crop::Cocoa,
        Crop::SugarCane,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Crop::Wheat => "wheat",
            Crop::Carrots => "carrots",
            Crop::Potatoes => "potatoes",
            Crop::Beetroots => "beetroots",
            Crop::Melon => "melon",
            Crop::Pumpkin => "pumpkin",
            Crop::SweetBerryBush => "sweet_berry_bush",
            Crop::Cocoa => "cocoa",
            Crop::SugarCane => "sugar_cane",
        }
    }

    /// Accepts block ids plus the item-style spellings agents tend to use.
    pub fn parse(s: &str) -> Option<Crop> {
        Some(match s {
            "wheat" => Crop::Wheat,
            "carrots" | "carrot" => Crop::Carrots,
            "potatoes" | "potato" => Crop::Potatoes,
            "beetroots" | "beetroot" => Crop::Beetroots,
            "melon" | "melon_stem" | "melons" => Crop::Melon,
            "pumpkin" | "pumpkin_stem" | "pumpkins" => Crop::Pumpkin,
            "sweet_berry_bush" | "sweet_berries" | "berries" => Crop::SweetBerryBush,
            "cocoa" | "cocoa_beans" => Crop::Cocoa,
            "sugar_cane" => Crop::SugarCane,
            _ => return None,
        })
    }

    pub fn max_stage(self) -> u8 {
        match self {
            Crop::Wheat | Crop::Carrots | Crop::Potatoes => 7,
            Crop::Beetroots | Crop::SweetBerryBush => 3,
            Crop::Melon | Crop::Pumpkin => 4,
            Crop::Cocoa | Crop::SugarCane => 2,
        }
    }

    pub fn soil(self) -> Soil {
        match self {
            Crop::SweetBerryBush | Crop::Cocoa | Crop::SugarCane => Soil::Dirt,
            _ => Soil::Farmland,
        }
    }

    /// Item consumed when planting.
    pub fn seed_item(self) -> &'static str {
        match self {
            Crop::Wheat => "wheat_seeds",
            Crop::Carrots => "carrot",
            Crop::Potatoes => "potato",
            Crop::Beetroots => "beetroot_seeds",
            Crop::Melon => "melon_seeds",
            Crop::Pumpkin => "pumpkin_seeds",
            Crop::SweetBerryBush => "sweet_berries",
            Crop::Cocoa => "cocoa_beans",
            Crop::SugarCane => "sugar_cane",
        }
    }

    /// Perennial crops survive harvesting and drop back to `regrow_stage`.
    pub fn is_perennial(self) -> bool {
        matches!(
            self,
            Crop::Melon | Crop::Pumpkin | Crop::SweetBerryBush | Crop::Cocoa | Crop::SugarCane
        )
    }

    pub fn regrow_stage(self) -> u8 {
        match self {
            Crop::SweetBerryBush => 1,
            _ => 0,
        }
    }
}

/// Block identifiers for grid cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Air,
    Dirt,
    Farmland,
    SlimeBlock,
    RedMushroomBlock,
    Crop(Crop),
    CraftingTable,
    Furnace,
    Chest,
}

impl Block {
    pub fn id(self) -> &'static str {
        match self {
            Block::Air => "air",
            Block::Dirt => "dirt",
            Block::Farmland => "farmland",
            Block::SlimeBlock => "slime_block",
            Block::RedMushroomBlock => "red_mushroom_block",
            Block::Crop(c) => c.id(),
            Block::CraftingTable => "crafting_table",
            Block::Furnace => "furnace",
            Block::Chest => "chest",
        }
    }

    pub fn parse(s: &str) -> Option<Block> {
        Some(match s {
            "air" => Block::Air,
            "dirt" => Block::Dirt,
            "farmland" => Block::Farmland,
            "slime_block" => Block::SlimeBlock,
            "red_mushroom_block" => Block::RedMushroomBlock,
            "crafting_table" => Block::CraftingTable,
            "furnace" => Block::Furnace,
            "chest" => Block::Chest,
            other => Block::Crop(Crop::parse(other)?),
        })
    }

    pub fn max_stage(self) -> u8 {
        match self {
            Block::Crop(c) => c.max_stage(),
            _ => 0,
        }
    }

    pub fn crop(self) -> Option<Crop> {
        match self {
            Block::Crop(c) => Some(c),
            _ => None,
        }
    }

    /// Workstations and storage cannot be broken by agents.
    pub fn is_fixture(self) -> bool {
        matches!(self, Block::Furnace | Block::Chest)
    }

    /// Blocks an agent may place from its inventory.
    pub fn is_placeable(self) -> bool {
        matches!(self, Block::SlimeBlock | Block::CraftingTable | Block::Dirt)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCell {
    pub kind: Block,
    pub growth_stage: u8,
    pub owner_area: Option<Team>,
    /// Block the layout originally put here when it regrows after removal.
    pub home: Option<Block>,
    /// Team whose agent placed the current block, if it was placed.
    pub placed_by: Option<Team>,
    /// Bumped on every kind change; stale timers compare against it.
    pub epoch: u32,
}

impl BlockCell {
    pub fn empty(owner_area: Option<Team>) -> Self {
        Self {
            kind: Block::Air,
            growth_stage: 0,
            owner_area,
            home: None,
            placed_by: None,
            epoch: 0,
        }
    }

    pub fn set_kind(&mut self, kind: Block, stage: u8) {
        self.kind = kind;
        self.growth_stage = stage.min(kind.max_stage());
        self.placed_by = None;
        self.epoch = self.epoch.wrapping_add(1);
    }

    pub fn is_mature(&self) -> bool {
        match self.kind {
            Block::Crop(c) => self.growth_stage >= c.max_stage(),
            _ => false,
        }
    }
}

/// Item stacks. Keys with a zero count are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Inventory {
    stacks: BTreeMap<String, u32>,
}

impl Inventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, item: &str) -> u32 {
        self.stacks.get(item).copied().unwrap_or(0)
    }

    pub fn add(&mut self, item: &str, count: u32) {
        if count == 0 {
            return;
        }
        *self.stacks.entry(item.to_string()).or_insert(0) += count;
    }

    /// Removes up to `count`, returning how many were actually taken.
    pub fn take(&mut self, item: &str, count: u32) -> u32 {
        let Some(held) = self.stacks.get_mut(item) else {
            return 0;
        };
        let taken = count.min(*held);
        *held -= taken;
        if *held == 0 {
            self.stacks.remove(item);
        }
        taken
    }

    pub fn total(&self) -> u64 {
        self.stacks.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.stacks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.stacks.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Number of 64-item slots the stacks would occupy.
    pub fn slots_used(&self) -> u32 {
        self.stacks.values().map(|&c| c.div_ceil(64)).sum()
    }
}

impl<'a> FromIterator<(&'a str, u32)> for Inventory {
    fn from_iter<I: IntoIterator<Item = (&'a str, u32)>>(iter: I) -> Self {
        let mut inv = Inventory::new();
        for (item, count) in iter {
            inv.add(item, count);
        }
        inv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Player,
    /// Stationary hand-in target named `<Team>_Server`.
    Server,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentBody {
    pub name: String,
    pub team: Team,
    pub role: AgentRole,
    pub position: Position,
    pub health: u8,
    pub hunger: u8,
    pub inventory: Inventory,
    pub equipment: Option<String>,
    pub busy_until: Option<u64>,
}

impl AgentBody {
    pub fn new(name: &str, team: Team, role: AgentRole, position: Position) -> Self {
        Self {
            name: name.to_string(),
            team,
            role,
            position,
            health: 20,
            hunger: 20,
            inventory: Inventory::new(),
            equipment: None,
            busy_until: None,
        }
    }

    pub fn is_player(&self) -> bool {
        self.role == AgentRole::Player
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mob {
    pub kind: String,
    pub position: Position,
    pub alive: bool,
}

/// Items lying on the ground, picked up by any agent within one cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundItem {
    pub position: Position,
    pub item: String,
    pub count: u32,
    /// Area of the block the items came from.
    pub origin_area: Option<Team>,
}

/// A pre-fueled furnace processes one queue at a time.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Furnace {
    /// Tick at which the last queued item completes; free once passed.
    pub busy_until: u64,
}

/// True if `s` looks like a namespaced-free item id (`[a-z0-9_]+`).
pub fn is_item_id(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}
