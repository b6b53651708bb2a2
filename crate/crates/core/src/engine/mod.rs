//! The joint-step state machine.
//!
//! One call to [`step`] runs this fixed pipeline:
//!
//! 1. dead and sleeping agents are forced to `NOOP`
//! 2. DO/PLACE intents on the faced cell are collected
//! 3. cells with several intents get one random winner; the rest are dropped
//! 4. movement, resolved simultaneously against pre-step occupancy
//! 5. DO / PLACE / MAKE / SLEEP effects in ascending agent order
//! 6. mobs, arrows, plants, spawning and despawning
//! 7. the clock advances; intrinsics, health, light and waking are updated
//! 8. deaths
//! 9. achievement unlocks
//! 10. rewards and done flags
//!
//! All randomness is drawn from substreams of the state's key indexed by the
//! step counter, so `step` is a pure function of `(config, state, actions)`.

mod achievements;
mod action;
mod conflict;
mod effects;
mod events;
mod mobs;
pub mod recipes;
mod rewards;
mod survival;

pub use achievements::unlock_achievements;
pub use action::ActionKind;
pub use conflict::{resolve_cell_conflicts, Intent, Resolution};
pub use effects::{apply_craft, apply_do, apply_place, apply_sleep, find_station};
pub use events::{FoodSource, HealthCause, Resource, StepEvent};
pub use mobs::{nearest_living_player, update_mobs};
pub use recipes::{recipe_for, Recipe, RECIPES};
pub use rewards::{base_reward_twentieths, compute_rewards};
pub use survival::{apply_deaths, update_survival};

use crate::config::GameConfig;
use crate::types::{AgentId, MAX_HEALTH_HALVES};
use crate::world::WorldState;
use crate::worldgen::{generate_world, WorldGenError};

/// Substream labels, one per consumer of per-step randomness.
pub(crate) mod label {
    pub const CONFLICT: u64 = 1;
    pub const MOVE: u64 = 2;
    pub const SAPLING: u64 = 3;
    pub const MOB: u64 = 4;
    pub const SPAWN: u64 = 5;
}

/// Daylight at step `t`: near 1 at midday, 0 at midnight. The curve
/// approximates `1 - |cos(pi * phase)|^3` with a smoothstep so that it is
/// bit-identical on every platform.
pub fn daylight(t: u32, day_length: u32) -> f32 {
    let phase = (t as f64 / day_length as f64 + 0.3).fract();
    let s = phase * phase * (3.0 - 2.0 * phase);
    let c = (1.0 - 2.0 * s).abs();
    (1.0 - c * c * c) as f32
}

/// Light level above which a rested sleeper wakes up.
pub const WAKE_LIGHT: f32 = 0.3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepResult {
    pub rewards: Vec<f32>,
    /// Per agent: the agent is dead or the episode is over.
    pub dones: Vec<bool>,
    pub events: Vec<StepEvent>,
    /// The episode is over; further steps are rejected.
    pub terminated: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StepError {
    #[error("expected {expected} actions, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("episode already terminated at step {0}")]
    Terminated(u32),
}

/// Whether the episode has ended. With fixed timesteps only the horizon
/// ends it; otherwise it also ends once every agent is dead.
pub fn is_terminated(cfg: &GameConfig, state: &WorldState) -> bool {
    if state.step_counter >= cfg.max_episode_steps {
        return true;
    }
    !cfg.fixed_timestep_mode && !state.any_alive()
}

pub fn step(cfg: &GameConfig, state: &mut WorldState, actions: &[ActionKind]) -> Result<StepResult, StepError> {
    let mut out = StepResult::default();
    step_into(cfg, state, actions, &mut out)?;
    Ok(out)
}

/// [`step`] writing into a reusable result.
pub fn step_into(
    cfg: &GameConfig,
    state: &mut WorldState,
    actions: &[ActionKind],
    out: &mut StepResult,
) -> Result<(), StepError> {
    let n = state.players.len();
    if actions.len() != n {
        return Err(StepError::ActionCount {
            expected: n,
            got: actions.len(),
        });
    }
    if is_terminated(cfg, state) {
        return Err(StepError::Terminated(state.step_counter));
    }
    out.events.clear();
    let events = &mut out.events;
    let step_rng = state.rng.substream(state.step_counter as u64);
    let prev_health: Vec<u8> = state.players.iter().map(|p| p.health_halves).collect();

    let mut effective: Vec<ActionKind> = state
        .players
        .iter()
        .zip(actions)
        .map(|(p, &a)| if p.alive && !p.sleeping { a } else { ActionKind::Noop })
        .collect();

    let intents: Vec<Intent> = effective
        .iter()
        .enumerate()
        .filter(|(_, a)| a.targets_cell())
        .map(|(i, &a)| Intent {
            agent: i as AgentId,
            target: state.players[i].facing(),
            action: a,
        })
        .collect();
    if intents.len() > 1 {
        let res = resolve_cell_conflicts(&intents, &step_rng.substream(label::CONFLICT), state.width);
        for loser in res.losers {
            effective[loser as usize] = ActionKind::Noop;
        }
    }

    effects::apply_movement(state, &effective, &step_rng.substream(label::MOVE));

    for (i, &a) in effective.iter().enumerate() {
        let agent = i as AgentId;
        match a {
            ActionKind::Do => apply_do(cfg, state, agent, &step_rng, events),
            ActionKind::Sleep => apply_sleep(state, agent),
            a if a.is_place() || a.is_make() => {
                let recipe = recipe_for(a).expect("recipe for every place/make action");
                if a.is_place() {
                    apply_place(cfg, state, agent, recipe, events);
                } else {
                    apply_craft(cfg, state, agent, recipe, events);
                }
            }
            _ => {}
        }
    }

    update_mobs(cfg, state, &step_rng, events);
    mobs::update_plants(cfg, state, events);

    state.step_counter += 1;
    update_survival(cfg, state, events);
    apply_deaths(state, events);
    unlock_achievements(state, events);

    compute_rewards(cfg, &prev_health, state, events, &mut out.rewards);
    out.terminated = is_terminated(cfg, state);
    out.dones.clear();
    out.dones
        .extend(state.players.iter().map(|p| out.terminated || !p.alive));
    Ok(())
}

/// Moves `agent`'s health by `delta` half points, clamped to the valid
/// range. Returns the applied change. Dead players are never touched.
pub(crate) fn change_health(
    state: &mut WorldState,
    agent: AgentId,
    delta: i16,
    cause: HealthCause,
    events: &mut Vec<StepEvent>,
) -> i16 {
    let p = &mut state.players[agent as usize];
    if !p.alive {
        return 0;
    }
    let before = p.health_halves as i16;
    let after = (before + delta).clamp(0, MAX_HEALTH_HALVES as i16);
    p.health_halves = after as u8;
    if delta < 0 && matches!(cause, HealthCause::Zombie | HealthCause::Arrow | HealthCause::Attacked) {
        p.sleeping = false;
    }
    let applied = after - before;
    if applied != 0 {
        events.push(StepEvent::HealthChanged {
            agent,
            delta_halves: applied as i8,
            cause,
        });
    }
    applied
}

/// A configured environment instance: the config plus its current state.
#[derive(Clone, Debug)]
pub struct Env {
    pub cfg: GameConfig,
    pub state: WorldState,
}

impl Env {
    pub fn new(cfg: GameConfig, seed: u64) -> Result<Env, WorldGenError> {
        let state = generate_world(&cfg, seed)?;
        Ok(Env { cfg, state })
    }

    pub fn from_state(cfg: GameConfig, state: WorldState) -> Env {
        Env { cfg, state }
    }

    pub fn reset(&mut self, seed: u64) -> Result<(), WorldGenError> {
        self.state = generate_world(&self.cfg, seed)?;
        Ok(())
    }

    pub fn step(&mut self, actions: &[ActionKind]) -> Result<StepResult, StepError> {
        step(&self.cfg, &mut self.state, actions)
    }

    pub fn step_into(&mut self, actions: &[ActionKind], out: &mut StepResult) -> Result<(), StepError> {
        step_into(&self.cfg, &mut self.state, actions, out)
    }

    pub fn terminated(&self) -> bool {
        is_terminated(&self.cfg, &self.state)
    }
}
