//! Game configuration and its validation.
//!
//! Configs are read from JSON with unknown keys rejected. Every field has a
//! default, so `{}` is a valid document. [`GameConfig::validate`] reports
//! every violated constraint at once rather than stopping at the first.

use crate::worldgen::TerrainParams;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// How agents are rewarded each step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
#[derive(Default)]
pub enum RewardScenario {
    /// Each agent earns its own achievements plus 0.1 times its health change.
    #[default]
    Independent,
    /// Every agent receives the sum of all agents' independent rewards.
    Shared,
    /// Independent rewards plus +1 per landed attack and -0.5 per attack suffered.
    Attack,
    /// Independent rewards plus `beta` per other agent in view.
    Proximity { beta: f64 },
}

/// Whether other agents may observe a given agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "k")]
pub enum VisibilityRule {
    Always,
    /// Visible while the episode clock is below `k`.
    FirstK(u32),
    Never,
}

impl VisibilityRule {
    #[inline]
    pub fn permits(self, step: u32) -> bool {
        match self {
            VisibilityRule::Always => true,
            VisibilityRule::FirstK(k) => step < k,
            VisibilityRule::Never => false,
        }
    }
}

/// Mob population, spawning and combat constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobConfig {
    pub zombie_cap: u16,
    pub skeleton_cap: u16,
    pub cow_cap: u16,
    pub arrow_cap: u16,
    /// Spawns happen no closer than this to the nearest living player.
    pub spawn_min_distance: u16,
    /// Mobs farther than this from every living player are removed.
    pub despawn_distance: u16,
    pub zombie_spawn_prob_day: f64,
    pub zombie_spawn_prob_night: f64,
    pub skeleton_spawn_prob: f64,
    pub cow_spawn_prob: f64,
    /// Zombies within this range of their target chase it.
    pub zombie_chase_distance: u16,
    /// Health points removed by a zombie hit on an awake player.
    pub zombie_damage: u8,
    /// Health points removed by a zombie hit on a sleeping player.
    pub zombie_sleep_damage: u8,
    pub zombie_cooldown: u8,
    pub skeleton_range: u16,
    pub skeleton_reload: u8,
    pub arrow_damage: u8,
    /// Number of cows placed by world generation.
    pub initial_cows: u16,
    pub initial_zombies: u16,
    pub initial_skeletons: u16,
}

impl Default for MobConfig {
    fn default() -> Self {
        MobConfig {
            zombie_cap: 6,
            skeleton_cap: 4,
            cow_cap: 8,
            arrow_cap: 12,
            spawn_min_distance: 6,
            despawn_distance: 18,
            zombie_spawn_prob_day: 0.01,
            zombie_spawn_prob_night: 0.2,
            skeleton_spawn_prob: 0.05,
            cow_spawn_prob: 0.02,
            zombie_chase_distance: 8,
            zombie_damage: 2,
            zombie_sleep_damage: 7,
            zombie_cooldown: 5,
            skeleton_range: 4,
            skeleton_reload: 4,
            arrow_damage: 2,
            initial_cows: 6,
            initial_zombies: 1,
            initial_skeletons: 2,
        }
    }
}

impl MobConfig {
    /// No mobs at all: nothing spawns and nothing is generated.
    pub fn disabled() -> Self {
        MobConfig {
            zombie_cap: 0,
            skeleton_cap: 0,
            cow_cap: 0,
            arrow_cap: 0,
            zombie_spawn_prob_day: 0.0,
            zombie_spawn_prob_night: 0.0,
            skeleton_spawn_prob: 0.0,
            cow_spawn_prob: 0.0,
            initial_cows: 0,
            initial_zombies: 0,
            initial_skeletons: 0,
            ..MobConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameConfig {
    pub map_width: u16,
    pub map_height: u16,
    pub n_agents: usize,
    pub view_rows: u16,
    pub view_cols: u16,
    pub max_episode_steps: u32,
    /// Run every episode to `max_episode_steps` regardless of deaths.
    pub fixed_timestep_mode: bool,
    pub day_length: u32,
    pub intrinsic_decay_interval: u32,
    pub health_regen_interval: u32,
    /// While asleep, energy recovers by one every this many steps.
    pub sleep_energy_interval: u32,
    pub plant_ripen_steps: u32,
    /// Probability that DO on grass yields a sapling.
    pub sapling_chance: f64,
    pub reward_scenario: RewardScenario,
    pub attack_enabled: bool,
    /// Include per-other-player blocks in observations.
    pub observe_others: bool,
    /// Visibility of each agent to the others; empty means everyone is
    /// always visible.
    pub expert_schedule: Vec<VisibilityRule>,
    /// Chebyshev radius within which a table or furnace counts as nearby.
    pub station_radius: u16,
    /// Preferred minimum Chebyshev distance between spawn cells.
    pub min_spawn_distance: u16,
    pub mobs: MobConfig,
    pub terrain: TerrainParams,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            map_width: 48,
            map_height: 48,
            n_agents: 4,
            view_rows: 7,
            view_cols: 9,
            max_episode_steps: 10_000,
            fixed_timestep_mode: false,
            day_length: 300,
            intrinsic_decay_interval: 25,
            health_regen_interval: 20,
            sleep_energy_interval: 10,
            plant_ripen_steps: 200,
            sapling_chance: 0.1,
            reward_scenario: RewardScenario::Independent,
            attack_enabled: false,
            observe_others: true,
            expert_schedule: Vec::new(),
            station_radius: 2,
            min_spawn_distance: 4,
            mobs: MobConfig::default(),
            terrain: TerrainParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigViolation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid config: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ConfigViolation>),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),
}

impl ConfigError {
    pub fn violations(&self) -> &[ConfigViolation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

impl GameConfig {
    pub fn from_json(text: &str) -> Result<GameConfig, ConfigError> {
        let raw: GameConfig = serde_json::from_str(text)?;
        raw.validate()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<GameConfig, ConfigError> {
        GameConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every constraint and returns the normalized config.
    ///
    /// Normalization: the attack reward scenario turns on `attack_enabled`.
    pub fn validate(mut self) -> Result<GameConfig, ConfigError> {
        let mut bad = Vec::new();
        let mut fail = |field: &str, message: String| {
            bad.push(ConfigViolation {
                field: field.to_string(),
                message,
            })
        };

        if self.n_agents == 0 {
            fail("n_agents", "must be at least 1".into());
        }
        if self.n_agents > 254 {
            fail("n_agents", "must be at most 254".into());
        }
        if self.view_rows == 0 || self.view_rows.is_multiple_of(2) {
            fail("view_rows", "must be odd and positive".into());
        }
        if self.view_cols == 0 || self.view_cols.is_multiple_of(2) {
            fail("view_cols", "must be odd and positive".into());
        }
        if self.map_height < self.view_rows || self.map_width < self.view_cols {
            fail(
                "map_width",
                format!(
                    "map smaller than view window ({}x{} map, {}x{} view)",
                    self.map_height, self.map_width, self.view_rows, self.view_cols
                ),
            );
        }
        for (name, v) in [
            ("max_episode_steps", self.max_episode_steps),
            ("day_length", self.day_length),
            ("intrinsic_decay_interval", self.intrinsic_decay_interval),
            ("health_regen_interval", self.health_regen_interval),
            ("sleep_energy_interval", self.sleep_energy_interval),
            ("plant_ripen_steps", self.plant_ripen_steps),
        ] {
            if v < 1 {
                fail(name, "interval must be at least 1".into());
            }
        }
        if !(0.0..=1.0).contains(&self.sapling_chance) {
            fail("sapling_chance", "must be a probability".into());
        }
        if let RewardScenario::Proximity { beta } = self.reward_scenario {
            if !(beta >= 0.0 && beta.is_finite()) {
                fail("reward_scenario.beta", "must be finite and >= 0".into());
            }
        }
        if !self.expert_schedule.is_empty() && self.expert_schedule.len() != self.n_agents {
            fail(
                "expert_schedule",
                format!(
                    "has {} entries for {} agents",
                    self.expert_schedule.len(),
                    self.n_agents
                ),
            );
        }
        let m = &self.mobs;
        for (name, p) in [
            ("mobs.zombie_spawn_prob_day", m.zombie_spawn_prob_day),
            ("mobs.zombie_spawn_prob_night", m.zombie_spawn_prob_night),
            ("mobs.skeleton_spawn_prob", m.skeleton_spawn_prob),
            ("mobs.cow_spawn_prob", m.cow_spawn_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                fail(name, "must be a probability".into());
            }
        }
        if m.despawn_distance < m.spawn_min_distance {
            fail("mobs.despawn_distance", "must be at least spawn_min_distance".into());
        }
        for (name, initial, cap) in [
            ("mobs.initial_cows", m.initial_cows, m.cow_cap),
            ("mobs.initial_zombies", m.initial_zombies, m.zombie_cap),
            ("mobs.initial_skeletons", m.initial_skeletons, m.skeleton_cap),
        ] {
            if initial > cap {
                fail(name, "exceeds the mob cap".into());
            }
        }
        for v in self.terrain.violations() {
            fail(&format!("terrain.{}", v.0), v.1);
        }

        if bad.is_empty() {
            if self.reward_scenario == RewardScenario::Attack {
                self.attack_enabled = true;
            }
            Ok(self)
        } else {
            Err(ConfigError::Invalid(bad))
        }
    }

    /// Visibility rule applied to `agent` as an observation target.
    #[inline]
    pub fn visibility_of(&self, agent: usize) -> VisibilityRule {
        self.expert_schedule
            .get(agent)
            .copied()
            .unwrap_or(VisibilityRule::Always)
    }

    /// Stable 64-bit digest of the canonical JSON form.
    pub fn digest(&self) -> u64 {
        let json = serde_json::to_vec(self).expect("config serializes");
        xxhash_rust::xxh3::xxh3_64(&json)
    }
}
