//! Throughput measurement for the step + encode loop.

use super::log::StepRecord;
use crate::config::GameConfig;
use crate::digest::digest_state_with;
use crate::engine::{step_into, ActionKind, StepResult};
use crate::observation::{encode_symbolic, obs_len};
use crate::rng::Rng;
use crate::worldgen::generate_world;
use rayon::prelude::*;
use serde::Serialize;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct BenchOptions {
    /// Wall-clock budget per measurement.
    pub duration: Duration,
    /// Also build step records (events, rewards, digest) as a logger would.
    pub logging: bool,
    /// Instances for the batched measurement; 0 skips it.
    pub batch_instances: usize,
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            duration: Duration::from_secs(2),
            logging: false,
            batch_instances: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BenchReport {
    pub n_agents: usize,
    pub env_steps: u64,
    pub seconds: f64,
    pub env_steps_per_sec: f64,
    /// `env_steps_per_sec × n_agents`.
    pub agent_steps_per_sec: f64,
    pub step_seconds: f64,
    pub encode_seconds: f64,
    pub log_seconds: f64,
    pub episodes: u64,
    pub batch_instances: usize,
    /// Aggregate agent-steps/sec over all batched instances, if measured.
    pub batched_agent_steps_per_sec: Option<f64>,
}

struct Phases {
    env_steps: u64,
    episodes: u64,
    step: Duration,
    encode: Duration,
    log: Duration,
    wall: Duration,
}

/// Steps one instance with uniform random actions until `budget` elapses,
/// encoding every agent's observation after each step.
fn run_instance(cfg: &GameConfig, seed: u64, budget: Duration, logging: bool) -> Phases {
    let n = cfg.n_agents;
    let len = obs_len(cfg);
    let mut obs = vec![0.0f32; n * len];
    let mut rng = Rng::new(seed).substream(0xBE7C);
    let mut episode_seed = seed;
    let mut state = generate_world(cfg, episode_seed).expect("bench world generates");
    let mut actions = vec![ActionKind::Noop; n];
    let mut result = StepResult::default();
    let mut records: Vec<StepRecord> = Vec::new();
    let mut digest_buf = Vec::new();
    let mut p = Phases {
        env_steps: 0,
        episodes: 0,
        step: Duration::ZERO,
        encode: Duration::ZERO,
        log: Duration::ZERO,
        wall: Duration::ZERO,
    };
    let start = Instant::now();
    while start.elapsed() < budget {
        for _ in 0..256 {
            for a in actions.iter_mut() {
                *a = ActionKind::ALL[rng.below(ActionKind::COUNT as u64) as usize];
            }
            let t0 = Instant::now();
            step_into(cfg, &mut state, &actions, &mut result).expect("bench step");
            let t1 = Instant::now();
            for i in 0..n {
                encode_symbolic(cfg, &state, i, &mut obs[i * len..(i + 1) * len]);
            }
            let t2 = Instant::now();
            if logging {
                records.push(StepRecord {
                    actions: actions.clone(),
                    rewards: result.rewards.clone(),
                    events: std::mem::take(&mut result.events),
                    digest: digest_state_with(&state, &mut digest_buf),
                });
            }
            let t3 = Instant::now();
            p.step += t1 - t0;
            p.encode += t2 - t1;
            p.log += t3 - t2;
            p.env_steps += 1;
            if result.terminated {
                p.episodes += 1;
                episode_seed = episode_seed.wrapping_add(1);
                state = generate_world(cfg, episode_seed).expect("bench world generates");
                records.clear();
            }
        }
    }
    p.wall = start.elapsed();
    std::hint::black_box(&obs);
    p
}

/// Measures single-instance throughput, then optionally the aggregate of
/// `batch_instances` instances run in parallel.
pub fn bench(cfg: &GameConfig, opts: &BenchOptions) -> BenchReport {
    let single = run_instance(cfg, opts.seed, opts.duration, opts.logging);
    let secs = single.wall.as_secs_f64();
    let env_rate = single.env_steps as f64 / secs;
    let batched = (opts.batch_instances > 0).then(|| {
        let start = Instant::now();
        let total: u64 = (0..opts.batch_instances)
            .into_par_iter()
            .map(|i| run_instance(cfg, opts.seed + 1000 + i as u64, opts.duration, opts.logging).env_steps)
            .sum();
        total as f64 * cfg.n_agents as f64 / start.elapsed().as_secs_f64()
    });
    BenchReport {
        n_agents: cfg.n_agents,
        env_steps: single.env_steps,
        seconds: secs,
        env_steps_per_sec: env_rate,
        agent_steps_per_sec: env_rate * cfg.n_agents as f64,
        step_seconds: single.step.as_secs_f64(),
        encode_seconds: single.encode.as_secs_f64(),
        log_seconds: single.log.as_secs_f64(),
        episodes: single.episodes,
        batch_instances: opts.batch_instances,
        batched_agent_steps_per_sec: batched,
    }
}
