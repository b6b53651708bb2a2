use super::events::StepEvent;
use crate::world::WorldState;

/// Records the first occurrence of each achievement per agent and appends an
/// `AchievementUnlocked` event for it. Returns the number unlocked.
pub fn unlock_achievements(state: &mut WorldState, events: &mut Vec<StepEvent>) -> usize {
    let before = events.len();
    for i in 0..before {
        if let Some((agent, achievement)) = events[i].achievement() {
            if state.players[agent as usize].achievements.insert(achievement) {
                events.push(StepEvent::AchievementUnlocked { agent, achievement });
            }
        }
    }
    events.len() - before
}
