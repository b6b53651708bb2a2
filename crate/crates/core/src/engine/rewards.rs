//! Scenario rewards.
//!
//! Rewards are accumulated in twentieths of a point: an achievement is 20,
//! a half point of health is 1 (0.1 × 0.5 = 0.05), a landed attack is 20 and
//! a suffered one is -10. Integer accumulation keeps rewards exactly
//! reconstructible from the event stream.

use super::events::StepEvent;
use crate::config::{GameConfig, RewardScenario};
use crate::observation::visible_players;
use crate::world::WorldState;

pub const ACHIEVEMENT_TWENTIETHS: i32 = 20;
pub const ATTACK_LANDED_TWENTIETHS: i32 = 20;
pub const ATTACK_SUFFERED_TWENTIETHS: i32 = -10;

/// Per-agent independent reward in twentieths: new achievements plus 0.1
/// times the health change.
pub fn base_reward_twentieths(prev_health: &[u8], state: &WorldState, events: &[StepEvent], out: &mut Vec<i32>) {
    out.clear();
    out.extend(
        state
            .players
            .iter()
            .zip(prev_health)
            .map(|(p, &h)| p.health_halves as i32 - h as i32),
    );
    for e in events {
        if let StepEvent::AchievementUnlocked { agent, .. } = e {
            out[*agent as usize] += ACHIEVEMENT_TWENTIETHS;
        }
    }
}

/// Writes one reward per agent for the configured scenario.
pub fn compute_rewards(
    cfg: &GameConfig,
    prev_health: &[u8],
    state: &WorldState,
    events: &[StepEvent],
    out: &mut Vec<f32>,
) {
    let mut base = Vec::with_capacity(state.players.len());
    base_reward_twentieths(prev_health, state, events, &mut base);
    out.clear();
    match cfg.reward_scenario {
        RewardScenario::Independent => out.extend(base.iter().map(|&b| b as f32 / 20.0)),
        RewardScenario::Shared => {
            let total = base.iter().sum::<i32>() as f32 / 20.0;
            out.extend(std::iter::repeat_n(total, base.len()));
        }
        RewardScenario::Attack => {
            for e in events {
                if let StepEvent::Attack { attacker, victim, .. } = e {
                    base[*attacker as usize] += ATTACK_LANDED_TWENTIETHS;
                    base[*victim as usize] += ATTACK_SUFFERED_TWENTIETHS;
                }
            }
            out.extend(base.iter().map(|&b| b as f32 / 20.0));
        }
        RewardScenario::Proximity { beta } => {
            for (i, &b) in base.iter().enumerate() {
                let seen = if state.players[i].alive {
                    visible_players(cfg, state, i).count()
                } else {
                    0
                };
                out.push((b as f64 / 20.0 + beta * seen as f64) as f32);
            }
        }
    }
}
