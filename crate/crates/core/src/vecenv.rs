//! Batched reset/step over flat buffers, for driving the engine from an
//! external training loop.
//!
//! Buffers are row-major: observations `[K × n_agents × obs_len]`, actions,
//! rewards and dones `[K × n_agents]`.

use crate::config::GameConfig;
use crate::engine::{step_into, ActionKind, StepEvent, StepResult};
use crate::observation::{encode_symbolic, obs_len, obs_manifest, ObsManifest};
use crate::rng::mix64;
use crate::world::WorldState;
use crate::worldgen::{generate_world, WorldGenError};

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error("expected {expected} seeds, got {got}")]
    SeedCount { expected: usize, got: usize },
    #[error("expected {expected} actions, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("batch has not been reset")]
    NotReset,
    #[error("world generation failed: {0}")]
    WorldGen(#[from] WorldGenError),
    #[error("config: {0}")]
    Config(#[from] crate::config::ConfigError),
}

/// Seed used for the `episode`-th automatic reset of an instance first
/// reset with `seed`.
pub fn auto_reset_seed(seed: u64, episode: u64) -> u64 {
    if episode == 0 {
        seed
    } else {
        mix64(seed ^ mix64(episode))
    }
}

/// Observations, rewards and dones buffers plus side information.
pub type BatchStep<'a> = (&'a [f32], &'a [f32], &'a [u8], BatchInfo);

/// Per-step side information.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchInfo {
    /// Events of the step just taken, per instance.
    pub events: Vec<Vec<StepEvent>>,
    /// Instances whose episode ended this step (and were reset, if enabled).
    pub episode_ended: Vec<bool>,
    /// Out-of-range actions mapped to NOOP this step, per instance.
    pub invalid_actions: Vec<u32>,
    /// Seed of the episode each instance is now in.
    pub seeds: Vec<u64>,
}

pub struct BatchEnv {
    cfg: GameConfig,
    manifest: ObsManifest,
    obs_len: usize,
    states: Vec<WorldState>,
    base_seeds: Vec<u64>,
    episodes: Vec<u64>,
    seeds: Vec<u64>,
    pub auto_reset: bool,
    obs: Vec<f32>,
    rewards: Vec<f32>,
    dones: Vec<u8>,
    result: StepResult,
    actions: Vec<ActionKind>,
}

impl BatchEnv {
    pub fn new(cfg: GameConfig, k: usize) -> Result<BatchEnv, BatchError> {
        let cfg = cfg.validate()?;
        let n = cfg.n_agents;
        let len = obs_len(&cfg);
        Ok(BatchEnv {
            manifest: obs_manifest(&cfg),
            obs_len: len,
            states: Vec::with_capacity(k),
            base_seeds: vec![0; k],
            episodes: vec![0; k],
            seeds: vec![0; k],
            auto_reset: true,
            obs: vec![0.0; k * n * len],
            rewards: vec![0.0; k * n],
            dones: vec![0; k * n],
            result: StepResult::default(),
            actions: vec![ActionKind::Noop; n],
            cfg,
        })
    }

    pub fn num_envs(&self) -> usize {
        self.base_seeds.len()
    }

    pub fn n_agents(&self) -> usize {
        self.cfg.n_agents
    }

    pub fn action_count(&self) -> usize {
        ActionKind::COUNT
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    pub fn manifest(&self) -> &ObsManifest {
        &self.manifest
    }

    pub fn config(&self) -> &GameConfig {
        &self.cfg
    }

    pub fn states(&self) -> &[WorldState] {
        &self.states
    }

    fn encode(&mut self, env: usize) {
        let n = self.cfg.n_agents;
        for a in 0..n {
            let o = (env * n + a) * self.obs_len;
            encode_symbolic(&self.cfg, &self.states[env], a, &mut self.obs[o..o + self.obs_len]);
        }
    }

    /// Resets every instance; returns the observation buffer.
    pub fn reset(&mut self, seeds: &[u64]) -> Result<&[f32], BatchError> {
        let k = self.num_envs();
        if seeds.len() != k {
            return Err(BatchError::SeedCount {
                expected: k,
                got: seeds.len(),
            });
        }
        self.states.clear();
        for (i, &s) in seeds.iter().enumerate() {
            self.states.push(generate_world(&self.cfg, s)?);
            self.base_seeds[i] = s;
            self.episodes[i] = 0;
            self.seeds[i] = s;
            self.encode(i);
        }
        self.rewards.fill(0.0);
        self.dones.fill(0);
        Ok(&self.obs)
    }

    /// Steps every instance. Out-of-range actions become NOOP and are
    /// counted. With `auto_reset`, an instance whose episode ended is reset
    /// and its observations are those of the new episode; its rewards and
    /// dones still describe the final step.
    pub fn step(&mut self, actions: &[i64]) -> Result<BatchStep<'_>, BatchError> {
        let k = self.num_envs();
        let n = self.cfg.n_agents;
        if self.states.len() != k {
            return Err(BatchError::NotReset);
        }
        if actions.len() != k * n {
            return Err(BatchError::ActionCount {
                expected: k * n,
                got: actions.len(),
            });
        }
        let mut info = BatchInfo {
            events: Vec::with_capacity(k),
            episode_ended: vec![false; k],
            invalid_actions: vec![0; k],
            seeds: Vec::new(),
        };
        for e in 0..k {
            for a in 0..n {
                let (act, ok) = ActionKind::from_raw(actions[e * n + a]);
                self.actions[a] = act;
                info.invalid_actions[e] += !ok as u32;
            }
            if crate::engine::is_terminated(&self.cfg, &self.states[e]) {
                // Only reachable with auto_reset off: hold the final state.
                self.rewards[e * n..(e + 1) * n].fill(0.0);
                self.dones[e * n..(e + 1) * n].fill(1);
                info.episode_ended[e] = true;
                info.events.push(Vec::new());
                continue;
            }
            step_into(&self.cfg, &mut self.states[e], &self.actions, &mut self.result)
                .expect("action count checked and episode live");
            self.rewards[e * n..(e + 1) * n].copy_from_slice(&self.result.rewards);
            for a in 0..n {
                self.dones[e * n + a] = self.result.dones[a] as u8;
            }
            info.events.push(std::mem::take(&mut self.result.events));
            if self.result.terminated {
                info.episode_ended[e] = true;
                if self.auto_reset {
                    self.episodes[e] += 1;
                    self.seeds[e] = auto_reset_seed(self.base_seeds[e], self.episodes[e]);
                    self.states[e] = generate_world(&self.cfg, self.seeds[e])?;
                }
            }
            self.encode(e);
        }
        info.seeds = self.seeds.clone();
        Ok((&self.obs, &self.rewards, &self.dones, info))
    }
}
