//! Crop patches, harvest drops and the farm-conversion sabotage.

use std::collections::BTreeSet;

use crate::world::{Block, Crop, Position, Soil, WorldState};

use super::rules::{roll_drops, CropDrops};

/// Connected groups (8-neighbourhood) of cells matching `pred`, in scan order.
pub fn patches(world: &WorldState, pred: impl Fn(Block) -> bool) -> Vec<Vec<Position>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let cells: Vec<Position> = world
        .cells()
        .filter(|(_, c)| pred(c.kind))
        .map(|(p, _)| p)
        .collect();
    let members: BTreeSet<Position> = cells.iter().copied().collect();
    for start in cells {
        if !seen.insert(start) {
            continue;
        }
        let mut patch = vec![start];
        let mut i = 0;
        while i < patch.len() {
            let p = patch[i];
            i += 1;
            for dz in -1..=1 {
                for dx in -1..=1 {
                    let q = Position::flat(p.x + dx, p.z + dz);
                    if members.contains(&q) && seen.insert(q) {
                        patch.push(q);
                    }
                }
            }
        }
        patch.sort_by_key(|p| (p.z, p.x));
        out.push(patch);
    }
    out
}

/// The patch closest to `from` (by its nearest cell) within `radius`,
/// restricted to patches with at least one cell passing `useful`.
pub fn nearest_patch(
    world: &WorldState,
    from: Position,
    radius: u32,
    pred: impl Fn(Block) -> bool,
    useful: impl Fn(Position) -> bool,
) -> Option<Vec<Position>> {
    patches(world, pred)
        .into_iter()
        .filter(|patch| patch.iter().any(|p| useful(*p)))
        .map(|patch| {
            let d = patch.iter().map(|p| p.chebyshev(from)).min().unwrap_or(u64::MAX);
            (d, patch)
        })
        .filter(|(d, _)| *d <= u64::from(radius))
        .min_by_key(|(d, _)| *d)
        .map(|(_, patch)| patch)
}

pub fn soil_block(soil: Soil) -> Block {
    match soil {
        Soil::Farmland => Block::Farmland,
        Soil::Dirt => Block::Dirt,
    }
}

/// Drops for breaking a crop cell: the full harvest table when mature, one
/// seed item otherwise.
pub fn crop_drops(
    world: &mut WorldState,
    crop: Crop,
    mature: bool,
    table: &[CropDrops],
) -> Vec<(String, u32)> {
    if !mature {
        return vec![(crop.seed_item().to_string(), 1)];
    }
    match table.iter().find(|d| d.crop == crop) {
        Some(d) => roll_drops(&d.drops, &mut world.rng),
        None => vec![(crop.seed_item().to_string(), 1)],
    }
}

/// Whether converting `from` into `to` needs a hoe: tilling is required
/// when the target grows on farmland and the source sat on plain dirt.
pub fn conversion_needs_hoe(from: Crop, to: Crop) -> bool {
    to.soil() == Soil::Farmland && from.soil() == Soil::Dirt
}

/// Destroys the nearest patch of `from` and replants every cell with `to`.
/// Drops land on the ground at each cell. Returns the converted cells.
pub fn sabotage_transform(
    world: &mut WorldState,
    agent: usize,
    from: Crop,
    to: Crop,
    radius: u32,
    table: &[CropDrops],
) -> Result<Vec<Position>, String> {
    if from == to {
        return Err(format!("{} is already {}", from.id(), to.id()));
    }
    if conversion_needs_hoe(from, to) && world.agents[agent].inventory.count("hoe") == 0 {
        return Err(format!(
            "I cannot convert {} to {} because I need: 1 more hoe",
            from.id(),
            to.id()
        ));
    }
    let origin = world.agents[agent].position;
    let patch = nearest_patch(world, origin, radius, |b| b == Block::Crop(from), |_| true)
        .ok_or_else(|| format!("No {} nearby to convert", from.id()))?;
    for &p in &patch {
        let cell = world.cell(p).expect("patch cell");
        let (mature, area) = (cell.is_mature(), cell.owner_area);
        for (item, n) in crop_drops(world, from, mature, table) {
            world.drop_items(p, &item, n, area);
        }
        world.plant(p, to, 0);
    }
    Ok(patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Layout, WorldRules};

    const LAYOUT: &str = r#"
schema = 1
name = "farm"
width = 10
depth = 4
[[areas]]
team = "red"
x = [0, 4]
z = [0, 3]
[[areas]]
team = "blue"
x = [5, 9]
z = [0, 3]
[[blocks]]
kind = "potatoes"
x = 0
z = 0
w = 2
d = 2
[[blocks]]
kind = "sweet_berry_bush"
x = 7
z = 0
w = 2
d = 1
[[blocks]]
kind = "potatoes"
x = 4
z = 3
[[agents]]
name = "a"
team = "red"
x = 2
z = 2
"#;

    fn world() -> WorldState {
        WorldState::new(&Layout::from_toml(LAYOUT).unwrap(), 1, WorldRules::default()).unwrap()
    }

    #[test]
    fn patches_are_connected_components() {
        let w = world();
        let found = patches(&w, |b| b == Block::Crop(Crop::Potatoes));
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].len(), 4);
        assert_eq!(found[1], vec![Position::flat(4, 3)]);
    }

    #[test]
    fn potatoes_to_berries() {
        let mut w = world();
        let cells = sabotage_transform(&mut w, 0, Crop::Potatoes, Crop::SweetBerryBush, 20, &[]).unwrap();
        assert_eq!(cells.len(), 4);
        for p in cells {
            assert_eq!(w.cell(p).unwrap().kind, Block::Crop(Crop::SweetBerryBush));
        }
        assert!(!w.ground_items.is_empty());
    }

    #[test]
    fn berries_to_potatoes_needs_hoe() {
        let mut w = world();
        let err = sabotage_transform(&mut w, 0, Crop::SweetBerryBush, Crop::Potatoes, 20, &[]).unwrap_err();
        assert!(err.contains("hoe"));
        w.agents[0].inventory.add("hoe", 1);
        assert_eq!(
            sabotage_transform(&mut w, 0, Crop::SweetBerryBush, Crop::Potatoes, 20, &[]).unwrap().len(),
            2
        );
    }

    #[test]
    fn missing_source_is_feedback() {
        let mut w = world();
        let err = sabotage_transform(&mut w, 0, Crop::Melon, Crop::Beetroots, 20, &[]).unwrap_err();
        assert_eq!(err, "No melon nearby to convert");
    }
}
