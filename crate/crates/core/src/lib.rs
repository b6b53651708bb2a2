//! A deterministic multi-agent survival grid world with crafting, mobs and
//! a tech tree of 22 achievements, plus tools to measure social behaviour
//! (cultural transmission, proximity, station sharing) over recorded
//! episodes.
//!
//! The engine is a pure function of `(config, state, actions)`; every
//! episode can be logged and replayed bit-exactly.

pub mod config;
pub mod digest;
pub mod engine;
pub mod metrics;
pub mod observation;
mod rng;
pub mod runner;
pub mod types;
pub mod vecenv;
pub mod world;
pub mod worldgen;

pub use config::{ConfigError, ConfigViolation, GameConfig, MobConfig, RewardScenario, VisibilityRule};
pub use digest::{digest_state, StateDigest};
pub use engine::{step, ActionKind, Env, StepError, StepEvent, StepResult};
pub use observation::{encode_symbolic, obs_len, obs_manifest, visible_players, ObsManifest};
pub use rng::Rng;
pub use runner::{replay, replay_gif, run_batch, run_episode, ExpertMode, Policy, ScenarioSpec, TrajectoryLog};
pub use types::*;
pub use vecenv::BatchEnv;
pub use world::{ProvenanceGrid, WorldState};
pub use worldgen::{generate_world, TerrainParams, WorldGenError};
