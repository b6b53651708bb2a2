//! Social-behaviour measurements over recorded episodes.

use crate::config::GameConfig;
use crate::engine::StepEvent;
use crate::observation::is_visible;
use crate::runner::{replay_with, ReplayError, TrajectoryLog};
use crate::types::{Achievement, AchievementSet, BlockKind};
use crate::world::WorldState;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("expert score is zero")]
    ZeroExpertScore,
    #[error("no samples for {0}")]
    NoSamples(&'static str),
    #[error("no {0} logs among the inputs")]
    MissingScenario(&'static str),
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
}

/// Per-episode achievement counts for the three learner scenarios and the
/// expert.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ScenarioScores {
    pub a_full: Vec<f64>,
    pub a_half: Vec<f64>,
    pub a_solo: Vec<f64>,
    pub e: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single sample.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Option<MeanStd> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(MeanStd {
            mean,
            std: var.sqrt(),
            n,
        })
    }

    pub fn exact(mean: f64) -> MeanStd {
        MeanStd { mean, std: 0.0, n: 1 }
    }

    pub fn std_error(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CtEstimate {
    pub value: f64,
    /// First-order propagation of the per-episode sample standard deviations.
    pub std: f64,
    /// The same propagation applied to standard errors of the means.
    pub std_error: f64,
}

/// `CT = ½ (A_full − A_solo)/E + ½ (A_half − A_solo)/E` from mean scores.
pub fn ct_value(a_full: f64, a_half: f64, a_solo: f64, e: f64) -> Result<f64, MetricsError> {
    if e == 0.0 {
        return Err(MetricsError::ZeroExpertScore);
    }
    Ok(0.5 * (a_full - a_solo) / e + 0.5 * (a_half - a_solo) / e)
}

/// CT with its uncertainty propagated to first order, treating the four
/// scores as independent:
/// `σ² = (σ_full² + σ_half²)/(4E²) + σ_solo²/E² + CT² σ_E²/E²`.
pub fn cultural_transmission_from(
    full: MeanStd,
    half: MeanStd,
    solo: MeanStd,
    e: MeanStd,
) -> Result<CtEstimate, MetricsError> {
    let value = ct_value(full.mean, half.mean, solo.mean, e.mean)?;
    let prop = |sf: f64, sh: f64, ss: f64, se: f64| {
        let e2 = e.mean * e.mean;
        ((sf * sf + sh * sh) / (4.0 * e2) + ss * ss / e2 + value * value * se * se / e2).sqrt()
    };
    Ok(CtEstimate {
        value,
        std: prop(full.std, half.std, solo.std, e.std),
        std_error: prop(full.std_error(), half.std_error(), solo.std_error(), e.std_error()),
    })
}

pub fn cultural_transmission(s: &ScenarioScores) -> Result<CtEstimate, MetricsError> {
    let get = |xs: &[f64], name| MeanStd::of(xs).ok_or(MetricsError::NoSamples(name));
    cultural_transmission_from(
        get(&s.a_full, "a_full")?,
        get(&s.a_half, "a_half")?,
        get(&s.a_solo, "a_solo")?,
        get(&s.e, "e")?,
    )
}

/// Sorts logs by expert scenario: learner slots feed `a_full`, `a_half` or
/// `a_solo`, and expert slots of every such log feed `e`. Logs from other
/// scenarios are ignored. Older logs without recorded expert slots are read
/// as agent 0 learning among experts.
pub fn scenario_scores_from_logs<'a>(
    logs: impl IntoIterator<Item = &'a TrajectoryLog>,
) -> Result<ScenarioScores, MetricsError> {
    let mut s = ScenarioScores::default();
    for log in logs {
        let mode = log.header.scenario.split('+').next().unwrap_or("");
        let bucket = match mode {
            "full_expert" => &mut s.a_full,
            "solo" => &mut s.a_solo,
            m if m.starts_with("half_expert") => &mut s.a_half,
            _ => continue,
        };
        let n = log.header.n_agents;
        let experts: Vec<usize> = if log.header.expert_slots.is_empty() {
            (1..n).collect()
        } else {
            log.header.expert_slots.clone()
        };
        for (slot, score) in log.scores().into_iter().enumerate() {
            if experts.contains(&slot) {
                s.e.push(score as f64);
            } else {
                bucket.push(score as f64);
            }
        }
    }
    for (xs, name) in [
        (&s.a_full, "full_expert"),
        (&s.a_half, "half_expert"),
        (&s.a_solo, "solo"),
        (&s.e, "expert"),
    ] {
        if xs.is_empty() {
            return Err(MetricsError::MissingScenario(name));
        }
    }
    Ok(s)
}

/// Counts, for each ordered pair, the steps where both agents are alive and
/// the target is visible to the observer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximityCounts {
    pub n_agents: usize,
    /// `[observer][target]` steps with both alive.
    pub both_alive: Vec<Vec<u64>>,
    /// `[observer][target]` of those, steps with the target in view.
    pub in_view: Vec<Vec<u64>>,
}

impl ProximityCounts {
    pub fn new(n_agents: usize) -> Self {
        ProximityCounts {
            n_agents,
            both_alive: vec![vec![0; n_agents]; n_agents],
            in_view: vec![vec![0; n_agents]; n_agents],
        }
    }

    pub fn observe(&mut self, cfg: &GameConfig, state: &WorldState) {
        for o in 0..self.n_agents {
            if !state.players[o].alive {
                continue;
            }
            for t in 0..self.n_agents {
                if t == o || !state.players[t].alive {
                    continue;
                }
                self.both_alive[o][t] += 1;
                self.in_view[o][t] += is_visible(cfg, state, o, t) as u64;
            }
        }
    }

    pub fn merge(&mut self, other: &ProximityCounts) {
        for o in 0..self.n_agents {
            for t in 0..self.n_agents {
                self.both_alive[o][t] += other.both_alive[o][t];
                self.in_view[o][t] += other.in_view[o][t];
            }
        }
    }

    pub fn report(&self) -> ProximityReport {
        let pairs: Vec<Vec<Option<f64>>> = (0..self.n_agents)
            .map(|o| {
                (0..self.n_agents)
                    .map(|t| {
                        let n = self.both_alive[o][t];
                        (t != o && n > 0).then(|| self.in_view[o][t] as f64 / n as f64)
                    })
                    .collect()
            })
            .collect();
        let defined: Vec<f64> = pairs.iter().flatten().flatten().copied().collect();
        let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
        ProximityReport { pairs, mean }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximityReport {
    /// `[observer][target]` fraction; `None` on the diagonal and for pairs
    /// never alive together.
    pub pairs: Vec<Vec<Option<f64>>>,
    pub mean: Option<f64>,
}

/// Proximity over an episode, measured on the state each action was chosen
/// in (the final state is not counted).
pub fn proximity_counts(log: &TrajectoryLog) -> Result<ProximityCounts, MetricsError> {
    let cfg = &log.header.config;
    let mut counts = ProximityCounts::new(log.header.n_agents);
    let n = log.steps.len();
    replay_with(log, |t, state| {
        if t < n {
            counts.observe(cfg, state);
        }
    })?;
    Ok(counts)
}

pub fn proximity_fraction(log: &TrajectoryLog) -> Result<ProximityReport, MetricsError> {
    Ok(proximity_counts(log)?.report())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AgentToolUse {
    pub own_station_uses: u64,
    pub other_station_uses: u64,
    /// Uses by placer id.
    pub by_placer: Vec<u64>,
    pub table_uses: u64,
    pub furnace_uses: u64,
}

impl AgentToolUse {
    pub fn total(&self) -> u64 {
        self.own_station_uses + self.other_station_uses
    }

    /// `own / (own + other)`, or `None` without any use.
    pub fn own_use_probability(&self) -> Option<f64> {
        let t = self.total();
        (t > 0).then(|| self.own_station_uses as f64 / t as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToolUseStats {
    pub agents: Vec<AgentToolUse>,
}

impl ToolUseStats {
    pub fn new(n_agents: usize) -> Self {
        ToolUseStats {
            agents: (0..n_agents)
                .map(|_| AgentToolUse {
                    by_placer: vec![0; n_agents],
                    ..AgentToolUse::default()
                })
                .collect(),
        }
    }

    pub fn add_events<'a>(&mut self, events: impl IntoIterator<Item = &'a StepEvent>) {
        for e in events {
            if let StepEvent::ToolUsed {
                agent, kind, placer, ..
            } = *e
            {
                let a = &mut self.agents[agent as usize];
                if placer == agent {
                    a.own_station_uses += 1;
                } else {
                    a.other_station_uses += 1;
                }
                a.by_placer[placer as usize] += 1;
                match kind {
                    BlockKind::CraftingTable => a.table_uses += 1,
                    BlockKind::Furnace => a.furnace_uses += 1,
                    _ => {}
                }
            }
        }
    }

    /// Own-use probability pooled over agents, with a Wilson 95% interval.
    pub fn pooled_own_use(&self) -> Option<(f64, (f64, f64))> {
        let own: u64 = self.agents.iter().map(|a| a.own_station_uses).sum();
        let total: u64 = self.agents.iter().map(|a| a.total()).sum();
        (total > 0).then(|| (own as f64 / total as f64, wilson_interval(own, total, 1.96)))
    }

    /// Chance of picking one's own station uniformly among all agents'.
    pub fn uniform_baseline(&self) -> f64 {
        1.0 / self.agents.len().max(1) as f64
    }
}

pub fn tool_use_stats(log: &TrajectoryLog) -> ToolUseStats {
    let mut s = ToolUseStats::new(log.header.n_agents);
    s.add_events(log.events());
    s
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AchievementSummary {
    pub episodes: usize,
    /// `[agent][achievement]` fraction of episodes where it was unlocked.
    pub per_agent: Vec<Vec<f64>>,
    /// Same, pooled over all agent-episodes.
    pub pooled: Vec<f64>,
    /// Achievements per agent-episode.
    pub score: MeanStd,
}

/// Per-achievement success probabilities and the mean score, from the final
/// achievement sets of each episode.
pub fn achievement_summary(episodes: &[Vec<AchievementSet>]) -> Result<AchievementSummary, MetricsError> {
    let n_agents = episodes
        .iter()
        .map(|e| e.len())
        .max()
        .ok_or(MetricsError::NoSamples("episodes"))?;
    let mut per_agent = vec![vec![0.0; Achievement::COUNT]; n_agents];
    let mut agent_eps = vec![0usize; n_agents];
    let mut pooled = vec![0.0; Achievement::COUNT];
    let mut scores = Vec::new();
    for ep in episodes {
        for (i, set) in ep.iter().enumerate() {
            agent_eps[i] += 1;
            for a in set.iter() {
                per_agent[i][a as usize] += 1.0;
                pooled[a as usize] += 1.0;
            }
            scores.push(set.len() as f64);
        }
    }
    for (row, &n) in per_agent.iter_mut().zip(&agent_eps) {
        row.iter_mut().for_each(|x| *x /= n.max(1) as f64);
    }
    pooled.iter_mut().for_each(|x| *x /= scores.len() as f64);
    Ok(AchievementSummary {
        episodes: episodes.len(),
        per_agent,
        pooled,
        score: MeanStd::of(&scores).ok_or(MetricsError::NoSamples("agents"))?,
    })
}

pub fn achievement_summary_from_logs<'a>(
    logs: impl IntoIterator<Item = &'a TrajectoryLog>,
) -> Result<AchievementSummary, MetricsError> {
    let eps: Vec<Vec<AchievementSet>> = logs.into_iter().map(|l| l.footer.final_achievements.clone()).collect();
    achievement_summary(&eps)
}

impl AchievementSummary {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("achievement,pooled");
        for i in 0..self.per_agent.len() {
            let _ = write!(s, ",agent_{i}");
        }
        s.push('\n');
        for a in Achievement::ALL {
            let _ = write!(s, "{},{:.6}", a.name(), self.pooled[a as usize]);
            for row in &self.per_agent {
                let _ = write!(s, ",{:.6}", row[a as usize]);
            }
            s.push('\n');
        }
        let _ = writeln!(s, "mean_score,{:.6}", self.score.mean);
        let _ = writeln!(s, "std_score,{:.6}", self.score.std);
        s
    }
}

impl ToolUseStats {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("agent,own,other,total,own_use_probability,table_uses,furnace_uses\n");
        for (i, a) in self.agents.iter().enumerate() {
            let p = a.own_use_probability().map_or(String::new(), |p| format!("{p:.6}"));
            let _ = writeln!(
                s,
                "{i},{},{},{},{p},{},{}",
                a.own_station_uses,
                a.other_station_uses,
                a.total(),
                a.table_uses,
                a.furnace_uses
            );
        }
        s
    }
}

impl ProximityReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("observer,target,fraction\n");
        for (o, row) in self.pairs.iter().enumerate() {
            for (t, f) in row.iter().enumerate() {
                if let Some(f) = f {
                    let _ = writeln!(s, "{o},{t},{f:.6}");
                }
            }
        }
        if let Some(m) = self.mean {
            let _ = writeln!(s, "mean,,{m:.6}");
        }
        s
    }
}

impl CtEstimate {
    pub fn to_csv(&self) -> String {
        format!(
            "ct,std,std_error\n{:.6},{:.6},{:.6}\n",
            self.value, self.std, self.std_error
        )
    }
}
