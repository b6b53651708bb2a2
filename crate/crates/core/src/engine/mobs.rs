//! Zombies, skeletons, cows, arrows and plants.

use super::events::{HealthCause, StepEvent};
use super::{change_health, label};
use crate::config::GameConfig;
use crate::rng::Rng;
use crate::types::{AgentId, BlockKind, Direction, MobKind, MobState, Pos};
use crate::world::WorldState;

/// Probability that a zombie in chase range steps toward its target.
const ZOMBIE_CHASE_PROB: f64 = 0.9;
const SKELETON_RETREAT_DISTANCE: i32 = 2;
const SKELETON_RETREAT_PROB: f64 = 0.3;
const SKELETON_SHOOT_PROB: f64 = 0.5;
const SKELETON_WANDER_PROB: f64 = 0.2;
const COW_WANDER_PROB: f64 = 0.5;

/// Nearest living player by Chebyshev distance, lowest id on ties.
pub fn nearest_living_player(state: &WorldState, pos: Pos) -> Option<(usize, i32)> {
    state
        .players
        .iter()
        .enumerate()
        .filter(|(_, p)| p.alive)
        .map(|(i, p)| (i, pos.chebyshev(p.pos)))
        .min_by_key(|&(i, d)| (d, i))
}

/// Mobs with zero health are pending removal and no longer occupy a cell.
fn blocked(state: &WorldState, cell: Pos) -> bool {
    state.living_player_at(cell).is_some() || state.mobs.iter().any(|m| m.health > 0 && m.pos == cell)
}

fn try_move(state: &mut WorldState, m: usize, dir: Direction) -> bool {
    let mob = state.mobs[m];
    let target = mob.pos.step(dir);
    if state.in_bounds(target) && mob.kind.can_enter(state.tile(target)) && !blocked(state, target) {
        state.mobs[m].pos = target;
        true
    } else {
        false
    }
}

fn random_dir(r: &mut Rng) -> Direction {
    Direction::ALL[r.below(4) as usize]
}

/// Moves, attacks, spawns and despawns every mob. Mobs are processed in list
/// order; arrows fired this step first move on the next one. Does nothing
/// when no player is alive.
pub fn update_mobs(cfg: &GameConfig, state: &mut WorldState, step_rng: &Rng, events: &mut Vec<StepEvent>) {
    if !state.any_alive() {
        return;
    }
    let mob_rng = step_rng.substream(label::MOB);
    let n = state.mobs.len();
    for m in 0..n {
        if state.mobs[m].health == 0 {
            continue;
        }
        let mut r = mob_rng.substream(m as u64);
        match state.mobs[m].kind {
            MobKind::Zombie => zombie(cfg, state, m, &mut r, events),
            MobKind::Skeleton => skeleton(cfg, state, m, &mut r, events),
            MobKind::Cow => {
                if r.chance(COW_WANDER_PROB) {
                    let d = random_dir(&mut r);
                    try_move(state, m, d);
                }
            }
            MobKind::Arrow => arrow(cfg, state, m, events),
        }
    }
    state.mobs.retain(|m| m.health > 0);
    despawn(cfg, state);
    spawn(cfg, state, &step_rng.substream(label::SPAWN));
}

fn zombie(cfg: &GameConfig, state: &mut WorldState, m: usize, r: &mut Rng, events: &mut Vec<StepEvent>) {
    let Some((target, dist)) = nearest_living_player(state, state.mobs[m].pos) else {
        return;
    };
    if dist <= 1 {
        if state.mobs[m].cooldown > 0 {
            state.mobs[m].cooldown -= 1;
        } else {
            let damage = if state.players[target].sleeping {
                cfg.mobs.zombie_sleep_damage
            } else {
                cfg.mobs.zombie_damage
            };
            change_health(
                state,
                target as AgentId,
                -2 * damage as i16,
                HealthCause::Zombie,
                events,
            );
            state.mobs[m].cooldown = cfg.mobs.zombie_cooldown;
        }
        return;
    }
    let pos = state.mobs[m].pos;
    if dist <= cfg.mobs.zombie_chase_distance as i32 && r.chance(ZOMBIE_CHASE_PROB) {
        if let Some(d) = Direction::toward(pos, state.players[target].pos) {
            try_move(state, m, d);
        }
    } else {
        let d = random_dir(r);
        try_move(state, m, d);
    }
}

fn skeleton(cfg: &GameConfig, state: &mut WorldState, m: usize, r: &mut Rng, events: &mut Vec<StepEvent>) {
    if state.mobs[m].cooldown > 0 {
        state.mobs[m].cooldown -= 1;
    }
    let pos = state.mobs[m].pos;
    let Some((target, dist)) = nearest_living_player(state, pos) else {
        return;
    };
    let toward = Direction::toward(pos, state.players[target].pos).unwrap_or(Direction::Down);
    if dist <= SKELETON_RETREAT_DISTANCE && r.chance(SKELETON_RETREAT_PROB) {
        try_move(state, m, toward.opposite());
    } else if state.mobs[m].cooldown == 0 && dist <= cfg.mobs.skeleton_range as i32 && r.chance(SKELETON_SHOOT_PROB) {
        state.mobs[m].heading = toward;
        state.mobs[m].cooldown = cfg.mobs.skeleton_reload;
        let cell = pos.step(toward);
        if let Some(hit) = state.living_player_at(cell) {
            change_health(
                state,
                hit as AgentId,
                -2 * cfg.mobs.arrow_damage as i16,
                HealthCause::Arrow,
                events,
            );
        } else if state.count_mobs(MobKind::Arrow) < cfg.mobs.arrow_cap as usize
            && state.in_bounds(cell)
            && MobKind::Arrow.can_enter(state.tile(cell))
            && !blocked(state, cell)
        {
            let mut arrow = MobState::new(MobKind::Arrow, cell);
            arrow.heading = toward;
            state.mobs.push(arrow);
        }
    } else if r.chance(SKELETON_WANDER_PROB) {
        let d = random_dir(r);
        try_move(state, m, d);
    }
}

fn arrow(cfg: &GameConfig, state: &mut WorldState, m: usize, events: &mut Vec<StepEvent>) {
    let next = state.mobs[m].pos.step(state.mobs[m].heading);
    if let Some(hit) = state.living_player_at(next) {
        change_health(
            state,
            hit as AgentId,
            -2 * cfg.mobs.arrow_damage as i16,
            HealthCause::Arrow,
            events,
        );
        state.mobs[m].health = 0;
    } else if !try_move(state, m, state.mobs[m].heading) {
        state.mobs[m].health = 0;
    }
}

fn despawn(cfg: &GameConfig, state: &mut WorldState) {
    let limit = cfg.mobs.despawn_distance as i32;
    let players: Vec<_> = state.players.iter().filter(|p| p.alive).map(|p| p.pos).collect();
    state
        .mobs
        .retain(|m| m.kind == MobKind::Arrow || players.iter().any(|&p| m.pos.chebyshev(p) <= limit));
}

/// One spawn attempt per mob kind: a uniform cell that must be valid
/// habitat, free, and within the spawn distance band of the nearest player.
fn spawn(cfg: &GameConfig, state: &mut WorldState, rng: &Rng) {
    let mc = &cfg.mobs;
    let night = 1.0 - state.light_level as f64;
    let zombie_p = mc.zombie_spawn_prob_day + (mc.zombie_spawn_prob_night - mc.zombie_spawn_prob_day) * night;
    let kinds = [
        (MobKind::Zombie, zombie_p, mc.zombie_cap, BlockKind::Grass),
        (
            MobKind::Skeleton,
            mc.skeleton_spawn_prob,
            mc.skeleton_cap,
            BlockKind::Path,
        ),
        (MobKind::Cow, mc.cow_spawn_prob, mc.cow_cap, BlockKind::Grass),
    ];
    for (kind, p, cap, habitat) in kinds {
        if state.count_mobs(kind) >= cap as usize {
            continue;
        }
        let mut r = rng.substream(kind as u64);
        if !r.chance(p) {
            continue;
        }
        let cell = state.pos_of(r.below(state.tiles.len() as u64) as usize);
        if state.tile(cell) != habitat || blocked(state, cell) {
            continue;
        }
        let Some((_, d)) = nearest_living_player(state, cell) else {
            return;
        };
        if d >= mc.spawn_min_distance as i32 && d <= mc.despawn_distance as i32 {
            state.mobs.push(MobState::new(kind, cell));
        }
    }
}

/// Ages saplings and ripens them after the configured number of steps.
pub(crate) fn update_plants(cfg: &GameConfig, state: &mut WorldState, events: &mut Vec<StepEvent>) {
    let mut plants = std::mem::take(&mut state.plants);
    plants.retain(|p| matches!(state.tile(p.pos), BlockKind::PlantSapling | BlockKind::PlantRipe));
    for plant in &mut plants {
        if state.tile(plant.pos) != BlockKind::PlantSapling {
            continue;
        }
        plant.age += 1;
        if plant.age >= cfg.plant_ripen_steps {
            state.set_tile(plant.pos, BlockKind::PlantRipe);
            events.push(StepEvent::BlockChanged {
                cell: plant.pos,
                from: BlockKind::PlantSapling,
                to: BlockKind::PlantRipe,
            });
        }
    }
    state.plants = plants;
}
