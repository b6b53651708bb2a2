//! Intrinsic decay, health regeneration, sleep and death.

use super::events::{HealthCause, StepEvent};
use super::{change_health, daylight, WAKE_LIGHT};
use crate::config::GameConfig;
use crate::types::{AgentId, BlockKind, MAX_LEVEL};
use crate::world::WorldState;

/// Health halves lost on a decay tick with any intrinsic at zero, and gained
/// on a regeneration tick with all intrinsics positive.
pub const DEPRIVATION_HALVES: i16 = 2;
pub const REGEN_HALVES: i16 = 2;

/// Runs after the clock has advanced: refreshes the light level, then for
/// every living agent applies decay, sleep recovery, deprivation damage or
/// regeneration, lava, and waking.
pub fn update_survival(cfg: &GameConfig, state: &mut WorldState, events: &mut Vec<StepEvent>) {
    let t = state.step_counter;
    state.light_level = daylight(t, cfg.day_length);
    let decay = t.is_multiple_of(cfg.intrinsic_decay_interval);
    let regen = t.is_multiple_of(cfg.health_regen_interval);
    let rest = t.is_multiple_of(cfg.sleep_energy_interval);

    for i in 0..state.players.len() {
        if !state.players[i].alive {
            continue;
        }
        let agent = i as AgentId;
        let p = &mut state.players[i];
        if decay {
            p.food = p.food.saturating_sub(1);
            p.drink = p.drink.saturating_sub(1);
            if !p.sleeping {
                p.energy = p.energy.saturating_sub(1);
            }
        }
        if p.sleeping && rest {
            p.energy = (p.energy + 1).min(MAX_LEVEL);
        }
        let starving = p.food == 0 || p.drink == 0 || p.energy == 0;
        if decay && starving {
            change_health(state, agent, -DEPRIVATION_HALVES, HealthCause::Deprivation, events);
        } else if regen && !starving {
            change_health(state, agent, REGEN_HALVES, HealthCause::Regeneration, events);
        }
        if state.tile(state.players[i].pos) == BlockKind::Lava {
            let h = state.players[i].health_halves as i16;
            change_health(state, agent, -h, HealthCause::Lava, events);
        }
        let p = &mut state.players[i];
        if p.sleeping && p.energy >= MAX_LEVEL && state.light_level > WAKE_LIGHT {
            p.sleeping = false;
            events.push(StepEvent::WokeUp { agent });
        }
    }
}

/// Marks players at zero health as dead. Dead players keep their position
/// and inventory but are skipped by everything else.
pub fn apply_deaths(state: &mut WorldState, events: &mut Vec<StepEvent>) {
    for (i, p) in state.players.iter_mut().enumerate() {
        if p.alive && p.health_halves == 0 {
            p.alive = false;
            p.sleeping = false;
            events.push(StepEvent::Death { agent: i as AgentId });
        }
    }
}
