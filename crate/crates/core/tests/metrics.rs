mod common;

use craftgrid::metrics::{
    achievement_summary, achievement_summary_from_logs, cultural_transmission, proximity_counts, proximity_fraction,
    ProximityCounts, ScenarioScores,
};
use craftgrid::runner::{expert_policy, random_policy, replay_with, run_batch, EpisodeOptions, Policy};
use craftgrid::{ExpertMode, GameConfig, ScenarioSpec};

#[test]
fn walkthrough_summary_is_all_ones() {
    let w = common::run_walkthrough();
    let s = achievement_summary(&[vec![w.state.players[0].achievements]]).unwrap();
    assert!(s.per_agent[0].iter().all(|&p| p == 1.0));
    assert_eq!(s.score.mean, 22.0);
}

fn scenario_scores(cfg: &GameConfig, mode: ExpertMode, seeds: &[u64]) -> Vec<f64> {
    let scenario = ScenarioSpec::with_experts(mode, cfg.n_agents);
    let factory = |_seed: u64| {
        let mut v: Vec<Box<dyn Policy>> = vec![random_policy()];
        v.extend((1..cfg.n_agents).map(|_| expert_policy(cfg)));
        v
    };
    let batch = run_batch(
        cfg,
        &scenario,
        &factory,
        seeds,
        4,
        EpisodeOptions { record_steps: false },
    )
    .unwrap();
    batch.logs().map(|l| l.scores()[0] as f64).collect()
}

#[test]
fn ct_pipeline_runs_end_to_end() {
    let cfg = GameConfig {
        max_episode_steps: 400,
        ..GameConfig::default()
    };
    let seeds: Vec<u64> = (0..12).collect();
    let solo_cfg = GameConfig {
        n_agents: 1,
        ..cfg.clone()
    };
    let experts: Vec<f64> = {
        let factory = |_seed: u64| vec![expert_policy(&solo_cfg)];
        let b = run_batch(
            &solo_cfg,
            &ScenarioSpec::plain(),
            &factory,
            &seeds,
            4,
            EpisodeOptions::default(),
        )
        .unwrap();
        b.logs().map(|l| l.scores()[0] as f64).collect()
    };
    let scores = ScenarioScores {
        a_full: scenario_scores(&cfg, ExpertMode::FullExpert, &seeds),
        a_half: scenario_scores(&cfg, ExpertMode::HalfExpert(50), &seeds),
        a_solo: scenario_scores(&cfg, ExpertMode::Solo, &seeds),
        e: experts,
    };
    let est = cultural_transmission(&scores).unwrap();
    assert!(est.value.is_finite() && est.std >= 0.0);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let oracle = 0.5 * (mean(&scores.a_full) - mean(&scores.a_solo)) / mean(&scores.e)
        + 0.5 * (mean(&scores.a_half) - mean(&scores.a_solo)) / mean(&scores.e);
    assert!((est.value - oracle).abs() < 1e-12);
}

#[test]
fn proximity_merges_across_episodes() {
    let cfg = GameConfig {
        max_episode_steps: 150,
        ..GameConfig::default()
    };
    let factory = |_seed: u64| (0..4).map(|_| random_policy()).collect::<Vec<Box<dyn Policy>>>();
    let b = run_batch(
        &cfg,
        &ScenarioSpec::plain(),
        &factory,
        &[1, 2, 3],
        3,
        EpisodeOptions::default(),
    )
    .unwrap();
    let mut merged = ProximityCounts::new(4);
    for log in b.logs() {
        merged.merge(&proximity_counts(log).unwrap());
        let r = proximity_fraction(log).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(r.pairs[i][j], r.pairs[j][i]);
                if let Some(f) = r.pairs[i][j] {
                    assert!((0.0..=1.0).contains(&f));
                }
            }
        }
    }
    // Independent count over replayed states.
    let mut mutual = 0u64;
    let mut near = 0u64;
    for log in b.logs() {
        replay_with(log, |t, s| {
            if t == log.n_steps() {
                return;
            }
            let (a, c) = (&s.players[0], &s.players[1]);
            if a.alive && c.alive {
                mutual += 1;
                near += ((a.pos.row - c.pos.row).abs() <= 3 && (a.pos.col - c.pos.col).abs() <= 4) as u64;
            }
        })
        .unwrap();
    }
    assert_eq!(merged.both_alive[0][1], mutual);
    let expected = if mutual == 0 {
        None
    } else {
        Some(near as f64 / mutual as f64)
    };
    assert_eq!(merged.report().pairs[0][1], expected);
    let summary = achievement_summary_from_logs(b.logs()).unwrap();
    assert_eq!(summary.episodes, 3);
}

#[test]
fn scores_are_sorted_by_scenario_label() {
    let cfg = GameConfig {
        max_episode_steps: 120,
        ..GameConfig::default()
    };
    let seeds = [4u64, 5];
    let factory = |_seed: u64| {
        let mut v: Vec<Box<dyn Policy>> = vec![random_policy()];
        v.extend((1..4).map(|_| expert_policy(&cfg)));
        v
    };
    let mut logs = Vec::new();
    for mode in [
        ExpertMode::FullExpert,
        ExpertMode::HalfExpert(50),
        ExpertMode::Solo,
        ExpertMode::None,
    ] {
        let scenario = ScenarioSpec::with_experts(mode, 4);
        let b = run_batch(
            &cfg,
            &scenario,
            &factory,
            &seeds,
            2,
            EpisodeOptions { record_steps: false },
        )
        .unwrap();
        logs.extend(b.episodes.into_iter().map(|(_, r)| r.unwrap()));
    }
    assert_eq!(logs[0].header.expert_slots, vec![1, 2, 3]);
    assert!(logs[6].header.expert_slots.is_empty());
    let s = craftgrid::metrics::scenario_scores_from_logs(&logs).unwrap();
    assert_eq!(
        (s.a_full.len(), s.a_half.len(), s.a_solo.len(), s.e.len()),
        (2, 2, 2, 18)
    );
    assert_eq!(s.a_full[0], logs[0].scores()[0] as f64);
    assert!(craftgrid::metrics::scenario_scores_from_logs(&logs[6..]).is_err());
}
