use crate::types::{Achievement, AgentId, BlockKind, Item, MobKind, Pos};
use serde::{Deserialize, Serialize};

/// What was gathered by a DO action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Wood,
    Stone,
    Coal,
    Iron,
    Diamond,
    Sapling,
    Drink,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoodSource {
    Cow,
    Plant,
}

/// Why a player's health moved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HealthCause {
    Zombie,
    Arrow,
    /// Hit by another player.
    Attacked,
    /// Healed by landing a hit on another player.
    AttackBonus,
    /// Food, drink or energy at zero on a decay tick.
    Deprivation,
    Regeneration,
    Lava,
}

/// Ordered record of everything a step changed. Within a step, action
/// effects come first in ascending agent order, then world updates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepEvent {
    AchievementUnlocked {
        agent: AgentId,
        achievement: Achievement,
    },
    /// A landed player-on-player hit; `damage_halves` is the victim's actual
    /// health loss in half points.
    Attack {
        attacker: AgentId,
        victim: AgentId,
        damage_halves: u8,
    },
    /// A station at `station` enabled a craft or placement by `agent`.
    ToolUsed {
        agent: AgentId,
        station: Pos,
        kind: BlockKind,
        placer: AgentId,
    },
    BlockChanged {
        cell: Pos,
        from: BlockKind,
        to: BlockKind,
    },
    Placed {
        agent: AgentId,
        cell: Pos,
        block: BlockKind,
    },
    Crafted {
        agent: AgentId,
        item: Item,
    },
    MobKilled {
        agent: AgentId,
        kind: MobKind,
    },
    Death {
        agent: AgentId,
    },
    ResourceCollected {
        agent: AgentId,
        cell: Pos,
        resource: Resource,
    },
    Ate {
        agent: AgentId,
        source: FoodSource,
    },
    WokeUp {
        agent: AgentId,
    },
    HealthChanged {
        agent: AgentId,
        delta_halves: i8,
        cause: HealthCause,
    },
}

impl StepEvent {
    /// Achievement implied by this event, if any.
    pub fn achievement(&self) -> Option<(AgentId, Achievement)> {
        use Achievement as A;
        match *self {
            StepEvent::ResourceCollected { agent, resource, .. } => Some((
                agent,
                match resource {
                    Resource::Wood => A::CollectWood,
                    Resource::Stone => A::CollectStone,
                    Resource::Coal => A::CollectCoal,
                    Resource::Iron => A::CollectIron,
                    Resource::Diamond => A::CollectDiamond,
                    Resource::Sapling => A::CollectSapling,
                    Resource::Drink => A::CollectDrink,
                },
            )),
            StepEvent::Placed { agent, block, .. } => match block {
                BlockKind::CraftingTable => Some((agent, A::PlaceTable)),
                BlockKind::Furnace => Some((agent, A::PlaceFurnace)),
                BlockKind::PlacedStone => Some((agent, A::PlaceStone)),
                BlockKind::PlantSapling => Some((agent, A::PlacePlant)),
                _ => None,
            },
            StepEvent::Crafted { agent, item } => match item {
                Item::WoodPickaxe => Some((agent, A::MakeWoodPickaxe)),
                Item::StonePickaxe => Some((agent, A::MakeStonePickaxe)),
                Item::IronPickaxe => Some((agent, A::MakeIronPickaxe)),
                Item::WoodSword => Some((agent, A::MakeWoodSword)),
                Item::StoneSword => Some((agent, A::MakeStoneSword)),
                Item::IronSword => Some((agent, A::MakeIronSword)),
                _ => None,
            },
            StepEvent::Ate { agent, source } => Some((
                agent,
                match source {
                    FoodSource::Cow => A::EatCow,
                    FoodSource::Plant => A::EatPlant,
                },
            )),
            StepEvent::MobKilled { agent, kind } => match kind {
                MobKind::Zombie => Some((agent, A::DefeatZombie)),
                MobKind::Skeleton => Some((agent, A::DefeatSkeleton)),
                _ => None,
            },
            StepEvent::WokeUp { agent } => Some((agent, A::WakeUp)),
            _ => None,
        }
    }
}
