//! Episode orchestration: scenarios, policies, batch execution, logging and
//! replay.

mod bench;
mod log;
mod policy;

pub use bench::{bench, BenchOptions, BenchReport};
pub use log::{
    decode_log, encode_log, read_log, write_log, LogError, LogFooter, LogHeader, StepRecord, TrajectoryLog,
    LOG_FORMAT_VERSION, LOG_MAGIC,
};
pub use policy::{
    expert_policy, noop_policy, policy_by_name, random_policy, survivor_policy, NoopPolicy, ObsView, Policy,
    RandomPolicy, ScriptedPolicy, Transition,
};

use crate::config::{GameConfig, RewardScenario, VisibilityRule};
use crate::digest::{digest_state, digest_state_with, StateDigest};
use crate::engine::{step_into, ActionKind, StepError, StepResult};
use crate::observation::{encode_symbolic, obs_len, render_frame, write_gif, MANIFEST_VERSION};
use crate::rng::Rng;
use crate::world::WorldState;
use crate::worldgen::{generate_world, WorldGenError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Substream of the episode seed that feeds policies; the engine uses a
/// different one, so policy draws never perturb the world.
const POLICY_STREAM: u64 = 0x504f_4c49;

/// Which agent slots hold experts and when the others can see them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "k")]
pub enum ExpertMode {
    /// No experts; every agent is visible to every other.
    None,
    /// Experts are present but never visible.
    Solo,
    /// Experts are visible all episode.
    FullExpert,
    /// Experts are visible while the clock is below `k`.
    HalfExpert(u32),
}

impl fmt::Display for ExpertMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpertMode::None => write!(f, "none"),
            ExpertMode::Solo => write!(f, "solo"),
            ExpertMode::FullExpert => write!(f, "full_expert"),
            ExpertMode::HalfExpert(k) => write!(f, "half_expert({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub mode: ExpertMode,
    pub reward: RewardScenario,
    /// Run exactly this many steps regardless of deaths.
    pub fixed_horizon: Option<u32>,
    /// Agent slots holding experts. Ignored when `mode` is `None`.
    pub expert_slots: Vec<usize>,
}

impl ScenarioSpec {
    /// Plain multi-agent play: no experts, independent rewards.
    pub fn plain() -> Self {
        ScenarioSpec {
            mode: ExpertMode::None,
            reward: RewardScenario::Independent,
            fixed_horizon: None,
            expert_slots: Vec::new(),
        }
    }

    /// Agent 0 learns; every other slot is an expert.
    pub fn with_experts(mode: ExpertMode, n_agents: usize) -> Self {
        ScenarioSpec {
            mode,
            expert_slots: (1..n_agents).collect(),
            ..ScenarioSpec::plain()
        }
    }

    pub fn is_expert(&self, slot: usize) -> bool {
        self.mode != ExpertMode::None && self.expert_slots.contains(&slot)
    }

    /// The config this scenario runs under.
    pub fn apply(&self, cfg: &GameConfig) -> GameConfig {
        let mut cfg = cfg.clone();
        cfg.reward_scenario = self.reward;
        if self.reward == RewardScenario::Attack {
            cfg.attack_enabled = true;
        }
        if let Some(h) = self.fixed_horizon {
            cfg.fixed_timestep_mode = true;
            cfg.max_episode_steps = h;
        }
        let expert_rule = match self.mode {
            ExpertMode::None => None,
            ExpertMode::Solo => Some(VisibilityRule::Never),
            ExpertMode::FullExpert => Some(VisibilityRule::Always),
            ExpertMode::HalfExpert(k) => Some(VisibilityRule::FirstK(k)),
        };
        cfg.expert_schedule = match expert_rule {
            None => Vec::new(),
            Some(rule) => (0..cfg.n_agents)
                .map(|i| {
                    if self.expert_slots.contains(&i) {
                        rule
                    } else {
                        VisibilityRule::Always
                    }
                })
                .collect(),
        };
        cfg
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}", self.mode);
        match self.reward {
            RewardScenario::Independent => {}
            RewardScenario::Shared => s.push_str("+shared"),
            RewardScenario::Attack => s.push_str("+attack"),
            RewardScenario::Proximity { beta } => s.push_str(&format!("+proximity({beta})")),
        }
        if let Some(h) = self.fixed_horizon {
            s.push_str(&format!("+fixed({h})"));
        }
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("expected {expected} policies, got {got}")]
    PolicyCount { expected: usize, got: usize },
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("world generation failed: {0}")]
    WorldGen(#[from] WorldGenError),
    #[error("config: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("step failed: {0}")]
    Step(#[from] StepError),
    #[error("duplicate seed {0} in batch")]
    DuplicateSeed(u64),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Options that do not change the trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeOptions {
    /// Record per-step records in the log (footer is always written).
    pub record_steps: bool,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        EpisodeOptions { record_steps: true }
    }
}

fn validate_scenario(cfg: &GameConfig, scenario: &ScenarioSpec) -> Result<(), RunError> {
    if let Some(&s) = scenario.expert_slots.iter().find(|&&s| s >= cfg.n_agents) {
        return Err(RunError::Scenario(format!(
            "expert slot {s} out of range for {} agents",
            cfg.n_agents
        )));
    }
    if scenario.fixed_horizon == Some(0) {
        return Err(RunError::Scenario("fixed horizon must be at least 1".into()));
    }
    Ok(())
}

/// Runs one episode to termination and returns its log. Expert slots must
/// hold frozen policies; only non-frozen policies receive learn callbacks.
pub fn run_episode(
    cfg: &GameConfig,
    scenario: &ScenarioSpec,
    policies: &mut [Box<dyn Policy>],
    seed: u64,
    opts: EpisodeOptions,
) -> Result<TrajectoryLog, RunError> {
    validate_scenario(cfg, scenario)?;
    let cfg = scenario.apply(cfg).validate()?;
    let n = cfg.n_agents;
    if policies.len() != n {
        return Err(RunError::PolicyCount {
            expected: n,
            got: policies.len(),
        });
    }
    if let Some(&s) = scenario
        .expert_slots
        .iter()
        .find(|&&s| scenario.is_expert(s) && !policies[s].is_frozen())
    {
        return Err(RunError::Scenario(format!("expert slot {s} holds a trainable policy")));
    }

    let mut state = generate_world(&cfg, seed)?;
    let header = LogHeader {
        format_version: LOG_FORMAT_VERSION.to_string(),
        config: cfg.clone(),
        config_digest: cfg.digest(),
        seed,
        n_agents: n,
        manifest_version: MANIFEST_VERSION.to_string(),
        policies: policies.iter().map(|p| p.name()).collect(),
        scenario: scenario.label(),
        expert_slots: scenario
            .expert_slots
            .iter()
            .copied()
            .filter(|&s| scenario.is_expert(s))
            .collect(),
        initial_digest: Some(digest_state(&state).to_string()),
    };
    for p in policies.iter_mut() {
        p.reset();
    }
    let base = Rng::new(seed).substream(POLICY_STREAM);
    let mut rngs: Vec<Rng> = (0..n).map(|i| base.substream(i as u64)).collect();
    let len = obs_len(&cfg);
    let mut obs = vec![0.0f32; n * len];
    let mut next_obs = vec![0.0f32; n * len];
    let learners: Vec<usize> = (0..n).filter(|&i| !policies[i].is_frozen()).collect();
    for i in 0..n {
        encode_symbolic(&cfg, &state, i, &mut obs[i * len..(i + 1) * len]);
    }

    let mut steps = Vec::new();
    let mut actions = vec![ActionKind::Noop; n];
    let mut result = StepResult::default();
    let mut digest_buf = Vec::new();
    let mut invalid = 0u64;
    loop {
        for i in 0..n {
            actions[i] = if state.players[i].alive {
                let raw = policies[i].act(&obs[i * len..(i + 1) * len], &mut rngs[i]);
                let (a, ok) = ActionKind::from_raw(raw);
                invalid += !ok as u64;
                a
            } else {
                ActionKind::Noop
            };
        }
        step_into(&cfg, &mut state, &actions, &mut result)?;
        for i in 0..n {
            encode_symbolic(&cfg, &state, i, &mut next_obs[i * len..(i + 1) * len]);
        }
        for &i in &learners {
            policies[i].learn(&Transition {
                agent: i,
                obs: &obs[i * len..(i + 1) * len],
                action: actions[i],
                reward: result.rewards[i],
                done: result.dones[i],
                next_obs: &next_obs[i * len..(i + 1) * len],
            });
        }
        if opts.record_steps {
            steps.push(StepRecord {
                actions: actions.clone(),
                rewards: result.rewards.clone(),
                events: std::mem::take(&mut result.events),
                digest: digest_state_with(&state, &mut digest_buf),
            });
        }
        std::mem::swap(&mut obs, &mut next_obs);
        if result.terminated {
            break;
        }
    }
    Ok(TrajectoryLog {
        header,
        steps,
        footer: LogFooter {
            final_achievements: state.players.iter().map(|p| p.achievements).collect(),
            invalid_actions: invalid,
            terminated: true,
        },
        migration_notes: Vec::new(),
    })
}

/// Creates a fresh policy set for one episode; called once per seed.
pub type PolicyFactory<'a> = dyn Fn(u64) -> Vec<Box<dyn Policy>> + Sync + 'a;

#[derive(Debug)]
pub struct BatchResult {
    /// One entry per seed, in seed order.
    pub episodes: Vec<(u64, Result<TrajectoryLog, RunError>)>,
}

impl BatchResult {
    pub fn logs(&self) -> impl Iterator<Item = &TrajectoryLog> {
        self.episodes.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    /// Mean achievements per agent-episode over successful episodes.
    pub fn mean_score(&self) -> f64 {
        let scores: Vec<usize> = self.logs().flat_map(|l| l.scores()).collect();
        if scores.is_empty() {
            0.0
        } else {
            scores.iter().sum::<usize>() as f64 / scores.len() as f64
        }
    }
}

/// Runs one episode per seed on `parallelism` worker threads. Results are
/// independent of the thread count. A failing episode is reported in its
/// slot without stopping the rest.
pub fn run_batch(
    cfg: &GameConfig,
    scenario: &ScenarioSpec,
    policies: &PolicyFactory<'_>,
    seeds: &[u64],
    parallelism: usize,
    opts: EpisodeOptions,
) -> Result<BatchResult, RunError> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(RunError::DuplicateSeed(w[0]));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let episodes = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let mut ps = policies(seed);
                (seed, run_episode(cfg, scenario, &mut ps, seed, opts))
            })
            .collect()
    });
    Ok(BatchResult { episodes })
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReplayError {
    #[error("log: {0}")]
    Log(String),
    #[error("world generation failed: {0}")]
    WorldGen(#[from] WorldGenError),
    #[error("replay diverged at step {step}: {what}")]
    Divergence { step: usize, what: String },
    #[error("render: {0}")]
    Render(String),
}

/// Re-simulates `log` from its seed and logged actions, checking every
/// step's events, rewards and digest. `visit` sees the state before each
/// step (index 0..n) and the final state (index n).
pub fn replay_with(log: &TrajectoryLog, mut visit: impl FnMut(usize, &WorldState)) -> Result<StateDigest, ReplayError> {
    let cfg = &log.header.config;
    let mut state = generate_world(cfg, log.header.seed)?;
    if let Some(expected) = &log.header.initial_digest {
        let got = digest_state(&state).to_string();
        if &got != expected {
            return Err(ReplayError::Divergence {
                step: 0,
                what: format!("initial digest {got} != logged {expected}"),
            });
        }
    }
    let mut result = StepResult::default();
    let mut buf = Vec::new();
    for (t, rec) in log.steps.iter().enumerate() {
        visit(t, &state);
        let diverged = |what: String| ReplayError::Divergence { step: t, what };
        step_into(cfg, &mut state, &rec.actions, &mut result).map_err(|e| diverged(e.to_string()))?;
        if result.events != rec.events {
            return Err(diverged("events differ".into()));
        }
        let same_rewards = result.rewards.len() == rec.rewards.len()
            && result
                .rewards
                .iter()
                .zip(&rec.rewards)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same_rewards {
            return Err(diverged(format!(
                "rewards {:?} != logged {:?}",
                result.rewards, rec.rewards
            )));
        }
        let d = digest_state_with(&state, &mut buf);
        if d != rec.digest {
            return Err(diverged(format!("digest {d} != logged {}", rec.digest)));
        }
    }
    visit(log.steps.len(), &state);
    Ok(digest_state(&state))
}

pub fn replay(log: &TrajectoryLog) -> Result<StateDigest, ReplayError> {
    replay_with(log, |_, _| {})
}

/// Replays `log` and writes one GIF frame per step, showing the state after
/// that step. Returns the number of frames written.
pub fn replay_gif<W: std::io::Write>(log: &TrajectoryLog, out: W, delay_ms: u32) -> Result<usize, ReplayError> {
    let mut frames = Vec::with_capacity(log.steps.len());
    replay_with(log, |t, s| {
        if t > 0 {
            frames.push(render_frame(s));
        }
    })?;
    let n = frames.len();
    write_gif(out, frames, delay_ms).map_err(|e| ReplayError::Render(e.to_string()))?;
    Ok(n)
}
