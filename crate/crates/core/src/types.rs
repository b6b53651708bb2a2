//! Grid, item, achievement and entity types shared by every module.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Index of a player slot within an episode.
pub type AgentId = u8;

/// Upper bound for every inventory count and intrinsic meter.
pub const MAX_LEVEL: u8 = 9;
/// Health is tracked in half points so that a landed attack can heal +0.5.
pub const MAX_HEALTH_HALVES: u8 = MAX_LEVEL * 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub row: i32,
    pub col: i32,
}

impl Pos {
    pub const fn new(row: i32, col: i32) -> Self {
        Pos { row, col }
    }

    #[inline]
    pub fn step(self, dir: Direction) -> Pos {
        let (dr, dc) = dir.delta();
        Pos::new(self.row + dr, self.col + dc)
    }

    #[inline]
    pub fn chebyshev(self, other: Pos) -> i32 {
        (self.row - other.row).abs().max((self.col - other.col).abs())
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Direction {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    #[inline]
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    /// Direction along the longer axis from `from` towards `to`. Ties go to
    /// the vertical axis; returns `None` when the positions coincide.
    pub fn toward(from: Pos, to: Pos) -> Option<Direction> {
        let dr = to.row - from.row;
        let dc = to.col - from.col;
        if dr == 0 && dc == 0 {
            return None;
        }
        Some(if dr.abs() >= dc.abs() {
            if dr > 0 {
                Direction::Down
            } else {
                Direction::Up
            }
        } else if dc > 0 {
            Direction::Right
        } else {
            Direction::Left
        })
    }

    pub fn from_index(i: u8) -> Option<Direction> {
        Direction::ALL.get(i as usize).copied()
    }
}

/// Contents of one map cell. `Darkness` only appears outside the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum BlockKind {
    Grass = 0,
    Sand,
    Water,
    Tree,
    Stone,
    Path,
    CoalOre,
    IronOre,
    DiamondOre,
    Lava,
    CraftingTable,
    Furnace,
    PlantSapling,
    PlantRipe,
    PlacedStone,
    Darkness,
}

impl BlockKind {
    pub const COUNT: usize = 16;

    pub const ALL: [BlockKind; BlockKind::COUNT] = [
        BlockKind::Grass,
        BlockKind::Sand,
        BlockKind::Water,
        BlockKind::Tree,
        BlockKind::Stone,
        BlockKind::Path,
        BlockKind::CoalOre,
        BlockKind::IronOre,
        BlockKind::DiamondOre,
        BlockKind::Lava,
        BlockKind::CraftingTable,
        BlockKind::Furnace,
        BlockKind::PlantSapling,
        BlockKind::PlantRipe,
        BlockKind::PlacedStone,
        BlockKind::Darkness,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u8) -> Option<BlockKind> {
        BlockKind::ALL.get(i as usize).copied()
    }

    /// Cells a player may step onto. Lava is walkable and lethal.
    #[inline]
    pub fn player_walkable(self) -> bool {
        matches!(
            self,
            BlockKind::Grass | BlockKind::Sand | BlockKind::Path | BlockKind::Lava
        )
    }

    /// Blocks that only exist because a player put them there.
    #[inline]
    pub fn is_player_placed(self) -> bool {
        matches!(
            self,
            BlockKind::CraftingTable
                | BlockKind::Furnace
                | BlockKind::PlantSapling
                | BlockKind::PlantRipe
                | BlockKind::PlacedStone
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Grass => "grass",
            BlockKind::Sand => "sand",
            BlockKind::Water => "water",
            BlockKind::Tree => "tree",
            BlockKind::Stone => "stone",
            BlockKind::Path => "path",
            BlockKind::CoalOre => "coal_ore",
            BlockKind::IronOre => "iron_ore",
            BlockKind::DiamondOre => "diamond_ore",
            BlockKind::Lava => "lava",
            BlockKind::CraftingTable => "crafting_table",
            BlockKind::Furnace => "furnace",
            BlockKind::PlantSapling => "plant_sapling",
            BlockKind::PlantRipe => "plant_ripe",
            BlockKind::PlacedStone => "placed_stone",
            BlockKind::Darkness => "darkness",
        }
    }

    /// Character used by the text map dump.
    pub fn glyph(self) -> char {
        match self {
            BlockKind::Grass => '.',
            BlockKind::Sand => ':',
            BlockKind::Water => '~',
            BlockKind::Tree => 'T',
            BlockKind::Stone => '#',
            BlockKind::Path => '_',
            BlockKind::CoalOre => 'c',
            BlockKind::IronOre => 'i',
            BlockKind::DiamondOre => 'd',
            BlockKind::Lava => '%',
            BlockKind::CraftingTable => 't',
            BlockKind::Furnace => 'f',
            BlockKind::PlantSapling => ',',
            BlockKind::PlantRipe => 'p',
            BlockKind::PlacedStone => 'S',
            BlockKind::Darkness => ' ',
        }
    }

    pub fn from_glyph(c: char) -> Option<BlockKind> {
        BlockKind::ALL.iter().copied().find(|b| b.glyph() == c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Item {
    Wood = 0,
    Stone,
    Coal,
    Iron,
    Diamond,
    Sapling,
    WoodPickaxe,
    StonePickaxe,
    IronPickaxe,
    WoodSword,
    StoneSword,
    IronSword,
}

impl Item {
    pub const COUNT: usize = 12;

    pub const ALL: [Item; Item::COUNT] = [
        Item::Wood,
        Item::Stone,
        Item::Coal,
        Item::Iron,
        Item::Diamond,
        Item::Sapling,
        Item::WoodPickaxe,
        Item::StonePickaxe,
        Item::IronPickaxe,
        Item::WoodSword,
        Item::StoneSword,
        Item::IronSword,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Item::Wood => "wood",
            Item::Stone => "stone",
            Item::Coal => "coal",
            Item::Iron => "iron",
            Item::Diamond => "diamond",
            Item::Sapling => "sapling",
            Item::WoodPickaxe => "wood_pickaxe",
            Item::StonePickaxe => "stone_pickaxe",
            Item::IronPickaxe => "iron_pickaxe",
            Item::WoodSword => "wood_sword",
            Item::StoneSword => "stone_sword",
            Item::IronSword => "iron_sword",
        }
    }
}

/// Per-item counts, each clamped to `[0, MAX_LEVEL]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inventory(pub [u8; Item::COUNT]);

impl Inventory {
    #[inline]
    pub fn get(&self, item: Item) -> u8 {
        self.0[item as usize]
    }

    #[inline]
    pub fn has(&self, item: Item) -> bool {
        self.get(item) > 0
    }

    pub fn add(&mut self, item: Item, n: u8) {
        let slot = &mut self.0[item as usize];
        *slot = slot.saturating_add(n).min(MAX_LEVEL);
    }

    /// Removes `n` if available; returns whether it did.
    pub fn take(&mut self, item: Item, n: u8) -> bool {
        let slot = &mut self.0[item as usize];
        if *slot >= n {
            *slot -= n;
            true
        } else {
            false
        }
    }

    pub fn set(&mut self, item: Item, n: u8) {
        self.0[item as usize] = n.min(MAX_LEVEL);
    }

    /// Mining tier: 0 none, 1 wood, 2 stone, 3 iron.
    pub fn pickaxe_tier(&self) -> u8 {
        if self.has(Item::IronPickaxe) {
            3
        } else if self.has(Item::StonePickaxe) {
            2
        } else if self.has(Item::WoodPickaxe) {
            1
        } else {
            0
        }
    }

    /// Melee damage in health points against mobs.
    pub fn melee_damage(&self) -> u8 {
        if self.has(Item::IronSword) {
            5
        } else if self.has(Item::StoneSword) {
            3
        } else if self.has(Item::WoodSword) {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Achievement {
    CollectCoal = 0,
    CollectDiamond,
    CollectDrink,
    CollectIron,
    CollectSapling,
    CollectStone,
    CollectWood,
    DefeatSkeleton,
    DefeatZombie,
    EatCow,
    EatPlant,
    MakeIronPickaxe,
    MakeIronSword,
    MakeStonePickaxe,
    MakeStoneSword,
    MakeWoodPickaxe,
    MakeWoodSword,
    PlaceFurnace,
    PlacePlant,
    PlaceStone,
    PlaceTable,
    WakeUp,
}

impl Achievement {
    pub const COUNT: usize = 22;

    pub const ALL: [Achievement; Achievement::COUNT] = [
        Achievement::CollectCoal,
        Achievement::CollectDiamond,
        Achievement::CollectDrink,
        Achievement::CollectIron,
        Achievement::CollectSapling,
        Achievement::CollectStone,
        Achievement::CollectWood,
        Achievement::DefeatSkeleton,
        Achievement::DefeatZombie,
        Achievement::EatCow,
        Achievement::EatPlant,
        Achievement::MakeIronPickaxe,
        Achievement::MakeIronSword,
        Achievement::MakeStonePickaxe,
        Achievement::MakeStoneSword,
        Achievement::MakeWoodPickaxe,
        Achievement::MakeWoodSword,
        Achievement::PlaceFurnace,
        Achievement::PlacePlant,
        Achievement::PlaceStone,
        Achievement::PlaceTable,
        Achievement::WakeUp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Achievement::CollectCoal => "collect_coal",
            Achievement::CollectDiamond => "collect_diamond",
            Achievement::CollectDrink => "collect_drink",
            Achievement::CollectIron => "collect_iron",
            Achievement::CollectSapling => "collect_sapling",
            Achievement::CollectStone => "collect_stone",
            Achievement::CollectWood => "collect_wood",
            Achievement::DefeatSkeleton => "defeat_skeleton",
            Achievement::DefeatZombie => "defeat_zombie",
            Achievement::EatCow => "eat_cow",
            Achievement::EatPlant => "eat_plant",
            Achievement::MakeIronPickaxe => "make_iron_pickaxe",
            Achievement::MakeIronSword => "make_iron_sword",
            Achievement::MakeStonePickaxe => "make_stone_pickaxe",
            Achievement::MakeStoneSword => "make_stone_sword",
            Achievement::MakeWoodPickaxe => "make_wood_pickaxe",
            Achievement::MakeWoodSword => "make_wood_sword",
            Achievement::PlaceFurnace => "place_furnace",
            Achievement::PlacePlant => "place_plant",
            Achievement::PlaceStone => "place_stone",
            Achievement::PlaceTable => "place_table",
            Achievement::WakeUp => "wake_up",
        }
    }
}

/// Bit set over the 22 achievements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AchievementSet(pub u32);

impl AchievementSet {
    #[inline]
    pub fn contains(self, a: Achievement) -> bool {
        self.0 & (1 << a as u32) != 0
    }

    /// Inserts `a`, returning `true` if it was not already present.
    #[inline]
    pub fn insert(&mut self, a: Achievement) -> bool {
        let fresh = !self.contains(a);
        self.0 |= 1 << a as u32;
        fresh
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Achievement> {
        Achievement::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerState {
    pub pos: Pos,
    pub dir: Direction,
    pub inventory: Inventory,
    pub health_halves: u8,
    pub food: u8,
    pub drink: u8,
    pub energy: u8,
    pub alive: bool,
    pub sleeping: bool,
    pub achievements: AchievementSet,
}

impl PlayerState {
    pub fn spawn(pos: Pos) -> Self {
        PlayerState {
            pos,
            dir: Direction::Down,
            inventory: Inventory::default(),
            health_halves: MAX_HEALTH_HALVES,
            food: MAX_LEVEL,
            drink: MAX_LEVEL,
            energy: MAX_LEVEL,
            alive: true,
            sleeping: false,
            achievements: AchievementSet::default(),
        }
    }

    /// Health in points, `[0, 9]` in steps of 0.5.
    pub fn health(&self) -> f32 {
        self.health_halves as f32 / 2.0
    }

    #[inline]
    pub fn facing(&self) -> Pos {
        self.pos.step(self.dir)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum MobKind {
    Zombie = 0,
    Skeleton,
    Cow,
    Arrow,
}

impl MobKind {
    pub const ALL: [MobKind; 4] = [MobKind::Zombie, MobKind::Skeleton, MobKind::Cow, MobKind::Arrow];

    pub fn name(self) -> &'static str {
        match self {
            MobKind::Zombie => "zombie",
            MobKind::Skeleton => "skeleton",
            MobKind::Cow => "cow",
            MobKind::Arrow => "arrow",
        }
    }

    pub fn max_health(self) -> u8 {
        match self {
            MobKind::Zombie => 5,
            MobKind::Skeleton => 3,
            MobKind::Cow => 3,
            MobKind::Arrow => 1,
        }
    }

    /// Terrain this mob may move onto.
    #[inline]
    pub fn can_enter(self, block: BlockKind) -> bool {
        match self {
            MobKind::Zombie | MobKind::Cow => {
                matches!(block, BlockKind::Grass | BlockKind::Sand | BlockKind::Path)
            }
            MobKind::Skeleton => block == BlockKind::Path,
            MobKind::Arrow => matches!(
                block,
                BlockKind::Grass | BlockKind::Sand | BlockKind::Path | BlockKind::Water | BlockKind::Lava
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MobState {
    pub kind: MobKind,
    pub pos: Pos,
    pub health: u8,
    pub heading: Direction,
    pub cooldown: u8,
}

impl MobState {
    pub fn new(kind: MobKind, pos: Pos) -> Self {
        MobState {
            kind,
            pos,
            health: kind.max_health(),
            heading: Direction::Down,
            cooldown: 0,
        }
    }
}

/// A placed plant and how long it has been growing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plant {
    pub pos: Pos,
    pub age: u32,
}
