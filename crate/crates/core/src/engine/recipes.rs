//! Crafting and placement recipes. Every cost and station requirement of the
//! tech tree lives in [`RECIPES`] so it can be re-pinned in one place.

use super::action::ActionKind;
use crate::types::{BlockKind, Item};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Product {
    Item(Item),
    Block(BlockKind),
}

#[derive(Clone, Copy, Debug)]
pub struct Recipe {
    pub action: ActionKind,
    pub product: Product,
    pub cost: &'static [(Item, u8)],
    pub needs_table: bool,
    pub needs_furnace: bool,
    /// Cells a placement may go onto; empty for crafted items.
    pub targets: &'static [BlockKind],
}

const SOLID_GROUND: &[BlockKind] = &[BlockKind::Grass, BlockKind::Sand, BlockKind::Path];

pub const RECIPES: [Recipe; 10] = [
    Recipe {
        action: ActionKind::PlaceStone,
        product: Product::Block(BlockKind::PlacedStone),
        cost: &[(Item::Stone, 1)],
        needs_table: false,
        needs_furnace: false,
        targets: &[
            BlockKind::Grass,
            BlockKind::Sand,
            BlockKind::Path,
            BlockKind::Water,
            BlockKind::Lava,
        ],
    },
    Recipe {
        action: ActionKind::PlaceTable,
        product: Product::Block(BlockKind::CraftingTable),
        cost: &[(Item::Wood, 2)],
        needs_table: false,
        needs_furnace: false,
        targets: SOLID_GROUND,
    },
    Recipe {
        action: ActionKind::PlaceFurnace,
        product: Product::Block(BlockKind::Furnace),
        cost: &[(Item::Stone, 1)],
        needs_table: true,
        needs_furnace: false,
        targets: SOLID_GROUND,
    },
    Recipe {
        action: ActionKind::PlacePlant,
        product: Product::Block(BlockKind::PlantSapling),
        cost: &[(Item::Sapling, 1)],
        needs_table: false,
        needs_furnace: false,
        targets: &[BlockKind::Grass],
    },
    Recipe {
        action: ActionKind::MakeWoodPickaxe,
        product: Product::Item(Item::WoodPickaxe),
        cost: &[(Item::Wood, 1)],
        needs_table: true,
        needs_furnace: false,
        targets: &[],
    },
    Recipe {
        action: ActionKind::MakeStonePickaxe,
        product: Product::Item(Item::StonePickaxe),
        cost: &[(Item::Wood, 1), (Item::Stone, 1)],
        needs_table: true,
        needs_furnace: false,
        targets: &[],
    },
    Recipe {
        action: ActionKind::MakeIronPickaxe,
        product: Product::Item(Item::IronPickaxe),
        cost: &[(Item::Wood, 1), (Item::Coal, 1), (Item::Iron, 1)],
        needs_table: true,
        needs_furnace: true,
        targets: &[],
    },
    Recipe {
        action: ActionKind::MakeWoodSword,
        product: Product::Item(Item::WoodSword),
        cost: &[(Item::Wood, 1)],
        needs_table: true,
        needs_furnace: false,
        targets: &[],
    },
    Recipe {
        action: ActionKind::MakeStoneSword,
        product: Product::Item(Item::StoneSword),
        cost: &[(Item::Wood, 1), (Item::Stone, 1)],
        needs_table: true,
        needs_furnace: false,
        targets: &[],
    },
    Recipe {
        action: ActionKind::MakeIronSword,
        product: Product::Item(Item::IronSword),
        cost: &[(Item::Wood, 1), (Item::Coal, 1), (Item::Iron, 1)],
        needs_table: true,
        needs_furnace: true,
        targets: &[],
    },
];

pub fn recipe_for(action: ActionKind) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.action == action)
}

/// Minimum pickaxe tier needed to mine `block` (0 = bare hands), or `None`
/// if DO on it never mines.
pub fn mining_tier(block: BlockKind) -> Option<u8> {
    match block {
        BlockKind::Tree => Some(0),
        BlockKind::Stone | BlockKind::CoalOre | BlockKind::PlacedStone => Some(1),
        BlockKind::IronOre => Some(2),
        BlockKind::DiamondOre => Some(3),
        _ => None,
    }
}
