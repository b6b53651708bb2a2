//! Per-agent action effects: movement, DO, placement, crafting and sleep.

use super::action::ActionKind;
use super::conflict::{resolve_cell_conflicts, Intent};
use super::events::{FoodSource, HealthCause, Resource, StepEvent};
use super::recipes::{mining_tier, Product, Recipe};
use super::{change_health, label};
use crate::config::GameConfig;
use crate::rng::Rng;
use crate::types::{AgentId, BlockKind, Item, MobKind, Plant, Pos, MAX_LEVEL};
use crate::world::WorldState;

/// Food restored by eating a cow and a ripe plant.
pub const COW_FOOD: u8 = 6;
pub const PLANT_FOOD: u8 = 4;

/// Health halves taken from the victim and given to the attacker by one hit.
pub const ATTACK_DAMAGE_HALVES: i16 = 2;
pub const ATTACK_HEAL_HALVES: i16 = 1;

/// Simultaneous movement. Every mover turns to face its direction; it moves
/// only if the target is walkable and free at the start of the step. Two
/// movers into the same free cell are arbitrated like DO conflicts.
pub(crate) fn apply_movement(state: &mut WorldState, actions: &[ActionKind], rng: &Rng) {
    let mut movers: Vec<Intent> = Vec::new();
    for (i, &a) in actions.iter().enumerate() {
        let Some(dir) = a.movement() else { continue };
        state.players[i].dir = dir;
        let target = state.players[i].pos.step(dir);
        if state.in_bounds(target) && state.tile(target).player_walkable() && !state.occupied(target) {
            movers.push(Intent {
                agent: i as AgentId,
                target,
                action: a,
            });
        }
    }
    if movers.is_empty() {
        return;
    }
    let res = resolve_cell_conflicts(&movers, rng, state.width);
    for (cell, winner) in res.winners {
        state.players[winner as usize].pos = cell;
    }
}

/// DO on the faced cell: attack a player, hit a mob, or collect from a block.
pub fn apply_do(cfg: &GameConfig, state: &mut WorldState, agent: AgentId, step_rng: &Rng, events: &mut Vec<StepEvent>) {
    let a = agent as usize;
    if !state.players[a].alive {
        return;
    }
    let target = state.players[a].facing();

    if let Some(victim) = state.living_player_at(target) {
        if cfg.attack_enabled && victim != a {
            let victim = victim as AgentId;
            let lost = -change_health(state, victim, -ATTACK_DAMAGE_HALVES, HealthCause::Attacked, events);
            change_health(state, agent, ATTACK_HEAL_HALVES, HealthCause::AttackBonus, events);
            events.push(StepEvent::Attack {
                attacker: agent,
                victim,
                damage_halves: lost as u8,
            });
        }
        return;
    }

    if let Some(m) = state.mob_at(target) {
        let kind = state.mobs[m].kind;
        if kind == MobKind::Arrow {
            return;
        }
        let damage = state.players[a].inventory.melee_damage();
        let mob = &mut state.mobs[m];
        mob.health = mob.health.saturating_sub(damage);
        if mob.health == 0 {
            state.mobs.remove(m);
            if kind == MobKind::Cow {
                let p = &mut state.players[a];
                p.food = (p.food + COW_FOOD).min(MAX_LEVEL);
                events.push(StepEvent::Ate {
                    agent,
                    source: FoodSource::Cow,
                });
            }
            events.push(StepEvent::MobKilled { agent, kind });
        }
        return;
    }

    if !state.in_bounds(target) {
        return;
    }
    let block = state.tile(target);
    match block {
        BlockKind::Grass => {
            let mut r = step_rng.substream(label::SAPLING).substream(agent as u64);
            if r.chance(cfg.sapling_chance) {
                state.players[a].inventory.add(Item::Sapling, 1);
                events.push(StepEvent::ResourceCollected {
                    agent,
                    cell: target,
                    resource: Resource::Sapling,
                });
            }
        }
        BlockKind::Water => {
            let p = &mut state.players[a];
            p.drink = (p.drink + 1).min(MAX_LEVEL);
            events.push(StepEvent::ResourceCollected {
                agent,
                cell: target,
                resource: Resource::Drink,
            });
        }
        BlockKind::PlantRipe => {
            state.set_tile(target, BlockKind::PlantSapling);
            if let Some(plant) = state.plants.iter_mut().find(|p| p.pos == target) {
                plant.age = 0;
            }
            let p = &mut state.players[a];
            p.food = (p.food + PLANT_FOOD).min(MAX_LEVEL);
            events.push(StepEvent::BlockChanged {
                cell: target,
                from: block,
                to: BlockKind::PlantSapling,
            });
            events.push(StepEvent::Ate {
                agent,
                source: FoodSource::Plant,
            });
        }
        _ => {
            let Some(tier) = mining_tier(block) else { return };
            if state.players[a].inventory.pickaxe_tier() < tier {
                return;
            }
            let (item, resource, leaves) = match block {
                BlockKind::Tree => (Item::Wood, Resource::Wood, BlockKind::Grass),
                BlockKind::Stone | BlockKind::PlacedStone => (Item::Stone, Resource::Stone, BlockKind::Path),
                BlockKind::CoalOre => (Item::Coal, Resource::Coal, BlockKind::Path),
                BlockKind::IronOre => (Item::Iron, Resource::Iron, BlockKind::Path),
                BlockKind::DiamondOre => (Item::Diamond, Resource::Diamond, BlockKind::Path),
                _ => unreachable!("mining_tier covers only minable blocks"),
            };
            state.players[a].inventory.add(item, 1);
            state.set_tile(target, leaves);
            let i = state.idx(target);
            state.provenance.clear(i);
            events.push(StepEvent::BlockChanged {
                cell: target,
                from: block,
                to: leaves,
            });
            events.push(StepEvent::ResourceCollected {
                agent,
                cell: target,
                resource,
            });
        }
    }
}

pub fn apply_sleep(state: &mut WorldState, agent: AgentId) {
    let p = &mut state.players[agent as usize];
    if p.alive && p.energy < MAX_LEVEL {
        p.sleeping = true;
    }
}

/// The station of `kind` within Chebyshev `radius` of `pos` that a craft
/// credits: nearest first, then lowest placer id, then row-major position.
/// Returns the cell and its placer.
pub fn find_station(state: &WorldState, pos: Pos, radius: u16, kind: BlockKind) -> Option<(Pos, AgentId)> {
    let r = radius as i32;
    let mut best: Option<(i32, AgentId, Pos)> = None;
    for dr in -r..=r {
        for dc in -r..=r {
            let cell = Pos::new(pos.row + dr, pos.col + dc);
            if state.tile(cell) != kind {
                continue;
            }
            // Stations written directly into a map have no placer; they are
            // credited to nobody and sort last.
            let placer = state.placer(cell).unwrap_or(AgentId::MAX);
            let key = (pos.chebyshev(cell), placer, cell);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, placer, cell)| (cell, placer))
}

/// Stations required by `recipe`, or `None` if one is missing.
fn required_stations(
    cfg: &GameConfig,
    state: &WorldState,
    pos: Pos,
    recipe: &Recipe,
) -> Option<[Option<(Pos, AgentId, BlockKind)>; 2]> {
    let mut found = [None, None];
    if recipe.needs_table {
        let (cell, placer) = find_station(state, pos, cfg.station_radius, BlockKind::CraftingTable)?;
        found[0] = Some((cell, placer, BlockKind::CraftingTable));
    }
    if recipe.needs_furnace {
        let (cell, placer) = find_station(state, pos, cfg.station_radius, BlockKind::Furnace)?;
        found[1] = Some((cell, placer, BlockKind::Furnace));
    }
    Some(found)
}

fn can_afford(state: &WorldState, agent: usize, recipe: &Recipe) -> bool {
    let inv = &state.players[agent].inventory;
    recipe.cost.iter().all(|&(item, n)| inv.get(item) >= n)
}

fn pay(state: &mut WorldState, agent: usize, recipe: &Recipe) {
    for &(item, n) in recipe.cost {
        state.players[agent].inventory.take(item, n);
    }
}

fn credit_stations(agent: AgentId, stations: [Option<(Pos, AgentId, BlockKind)>; 2], events: &mut Vec<StepEvent>) {
    for (station, placer, kind) in stations.into_iter().flatten() {
        if placer != AgentId::MAX {
            events.push(StepEvent::ToolUsed {
                agent,
                station,
                kind,
                placer,
            });
        }
    }
}

/// Places the recipe's block on the faced cell if it is a legal, unoccupied
/// target and the agent can pay. Records the placer.
pub fn apply_place(
    cfg: &GameConfig,
    state: &mut WorldState,
    agent: AgentId,
    recipe: &Recipe,
    events: &mut Vec<StepEvent>,
) {
    let a = agent as usize;
    let Product::Block(block) = recipe.product else { return };
    if !state.players[a].alive {
        return;
    }
    let pos = state.players[a].pos;
    let target = state.players[a].facing();
    if !state.in_bounds(target) || state.occupied(target) {
        return;
    }
    let from = state.tile(target);
    if !recipe.targets.contains(&from) || !can_afford(state, a, recipe) {
        return;
    }
    let Some(stations) = required_stations(cfg, state, pos, recipe) else {
        return;
    };
    pay(state, a, recipe);
    state.set_tile(target, block);
    let i = state.idx(target);
    state.provenance.set(i, agent);
    if block == BlockKind::PlantSapling {
        state.plants.retain(|p| p.pos != target);
        state.plants.push(Plant { pos: target, age: 0 });
    }
    credit_stations(agent, stations, events);
    events.push(StepEvent::BlockChanged {
        cell: target,
        from,
        to: block,
    });
    events.push(StepEvent::Placed {
        agent,
        cell: target,
        block,
    });
}

/// Crafts the recipe's item if the stations are nearby, the agent can pay,
/// and the item is not already at the inventory cap.
pub fn apply_craft(
    cfg: &GameConfig,
    state: &mut WorldState,
    agent: AgentId,
    recipe: &Recipe,
    events: &mut Vec<StepEvent>,
) {
    let a = agent as usize;
    let Product::Item(item) = recipe.product else { return };
    if !state.players[a].alive || state.players[a].inventory.get(item) >= MAX_LEVEL || !can_afford(state, a, recipe) {
        return;
    }
    let pos = state.players[a].pos;
    let Some(stations) = required_stations(cfg, state, pos, recipe) else {
        return;
    };
    pay(state, a, recipe);
    state.players[a].inventory.add(item, 1);
    credit_stations(agent, stations, events);
    events.push(StepEvent::Crafted { agent, item });
}
