use crate::types::Direction;
use serde::{Deserialize, Serialize};

/// The 17 discrete player actions, in wire order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[repr(u8)]
pub enum ActionKind {
    Noop = 0,
    Left,
    Right,
    Up,
    Down,
    Do,
    Sleep,
    PlaceStone,
    PlaceTable,
    PlaceFurnace,
    PlacePlant,
    MakeWoodPickaxe,
    MakeStonePickaxe,
    MakeIronPickaxe,
    MakeWoodSword,
    MakeStoneSword,
    MakeIronSword,
}

impl ActionKind {
    pub const COUNT: usize = 17;

    pub const ALL: [ActionKind; ActionKind::COUNT] = [
        ActionKind::Noop,
        ActionKind::Left,
        ActionKind::Right,
        ActionKind::Up,
        ActionKind::Down,
        ActionKind::Do,
        ActionKind::Sleep,
        ActionKind::PlaceStone,
        ActionKind::PlaceTable,
        ActionKind::PlaceFurnace,
        ActionKind::PlacePlant,
        ActionKind::MakeWoodPickaxe,
        ActionKind::MakeStonePickaxe,
        ActionKind::MakeIronPickaxe,
        ActionKind::MakeWoodSword,
        ActionKind::MakeStoneSword,
        ActionKind::MakeIronSword,
    ];

    #[inline]
    pub fn from_index(i: u8) -> Option<ActionKind> {
        ActionKind::ALL.get(i as usize).copied()
    }

    /// Maps any integer to an action; out-of-range values become `Noop`.
    /// The second element reports whether the input was valid.
    #[inline]
    pub fn from_raw(raw: i64) -> (ActionKind, bool) {
        if (0..ActionKind::COUNT as i64).contains(&raw) {
            (ActionKind::ALL[raw as usize], true)
        } else {
            (ActionKind::Noop, false)
        }
    }

    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn movement(self) -> Option<Direction> {
        match self {
            ActionKind::Left => Some(Direction::Left),
            ActionKind::Right => Some(Direction::Right),
            ActionKind::Up => Some(Direction::Up),
            ActionKind::Down => Some(Direction::Down),
            _ => None,
        }
    }

    pub fn is_place(self) -> bool {
        matches!(
            self,
            ActionKind::PlaceStone | ActionKind::PlaceTable | ActionKind::PlaceFurnace | ActionKind::PlacePlant
        )
    }

    pub fn is_make(self) -> bool {
        (ActionKind::MakeWoodPickaxe as u8..=ActionKind::MakeIronSword as u8).contains(&(self as u8))
    }

    /// Actions that act on the faced cell and are subject to arbitration.
    pub fn targets_cell(self) -> bool {
        self == ActionKind::Do || self.is_place()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Noop => "NOOP",
            ActionKind::Left => "LEFT",
            ActionKind::Right => "RIGHT",
            ActionKind::Up => "UP",
            ActionKind::Down => "DOWN",
            ActionKind::Do => "DO",
            ActionKind::Sleep => "SLEEP",
            ActionKind::PlaceStone => "PLACE_STONE",
            ActionKind::PlaceTable => "PLACE_TABLE",
            ActionKind::PlaceFurnace => "PLACE_FURNACE",
            ActionKind::PlacePlant => "PLACE_PLANT",
            ActionKind::MakeWoodPickaxe => "MAKE_WOOD_PICKAXE",
            ActionKind::MakeStonePickaxe => "MAKE_STONE_PICKAXE",
            ActionKind::MakeIronPickaxe => "MAKE_IRON_PICKAXE",
            ActionKind::MakeWoodSword => "MAKE_WOOD_SWORD",
            ActionKind::MakeStoneSword => "MAKE_STONE_SWORD",
            ActionKind::MakeIronSword => "MAKE_IRON_SWORD",
        }
    }
}
