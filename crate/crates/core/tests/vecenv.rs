use craftgrid::runner::{run_episode, EpisodeOptions, Policy};
use craftgrid::vecenv::{auto_reset_seed, BatchError};
use craftgrid::{generate_world, obs_len, BatchEnv, GameConfig, Rng, ScenarioSpec};

fn cfg() -> GameConfig {
    GameConfig {
        max_episode_steps: 60,
        ..GameConfig::default()
    }
}

#[test]
fn single_instance_buffer_matches_manifest() {
    let mut b = BatchEnv::new(cfg(), 1).unwrap();
    let obs = b.reset(&[3]).unwrap();
    assert_eq!(obs.len(), 4 * b.manifest().total_len);
    assert_eq!(b.obs_len(), obs_len(&cfg()));
    assert_eq!(b.action_count(), 17);
}

#[test]
fn same_seeds_same_buffers_and_unit_range() {
    let mut a = BatchEnv::new(cfg(), 3).unwrap();
    let mut b = BatchEnv::new(cfg(), 3).unwrap();
    let oa = a.reset(&[1, 2, 3]).unwrap().to_vec();
    let ob = b.reset(&[1, 2, 3]).unwrap().to_vec();
    assert_eq!(oa, ob);
    assert!(oa.iter().all(|v| (0.0..=1.0).contains(v)));
    let actions: Vec<i64> = (0..12).map(|i| i % 17).collect();
    for _ in 0..30 {
        let (o1, r1, d1, _) = a.step(&actions).unwrap();
        let (o1, r1, d1) = (o1.to_vec(), r1.to_vec(), d1.to_vec());
        let (o2, r2, d2, _) = b.step(&actions).unwrap();
        assert_eq!((o1.as_slice(), r1.as_slice(), d1.as_slice()), (o2, r2, d2));
        assert!(o1.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn wrong_sizes_are_rejected() {
    let mut b = BatchEnv::new(cfg(), 2).unwrap();
    assert!(matches!(b.step(&[0; 8]), Err(BatchError::NotReset)));
    assert!(matches!(
        b.reset(&[1]),
        Err(BatchError::SeedCount { expected: 2, got: 1 })
    ));
    b.reset(&[1, 2]).unwrap();
    assert!(matches!(
        b.step(&[0; 7]),
        Err(BatchError::ActionCount { expected: 8, got: 7 })
    ));
}

#[test]
fn episodes_auto_reset_with_derived_seeds() {
    let mut b = BatchEnv::new(cfg(), 2).unwrap();
    b.reset(&[10, 20]).unwrap();
    let noop = vec![0i64; 8];
    for t in 1..=60 {
        let (_, _, dones, info) = b.step(&noop).unwrap();
        let ended = t == 60;
        assert_eq!(info.episode_ended, vec![ended; 2]);
        assert_eq!(dones.iter().all(|&d| d == 1), ended);
        if ended {
            assert_eq!(info.seeds, vec![auto_reset_seed(10, 1), auto_reset_seed(20, 1)]);
        }
    }
    let fresh = generate_world(b.config(), auto_reset_seed(10, 1)).unwrap();
    assert_eq!(craftgrid::digest_state(&b.states()[0]), craftgrid::digest_state(&fresh));
    assert_eq!(auto_reset_seed(10, 0), 10);
}

#[test]
fn invalid_actions_are_counted() {
    let mut b = BatchEnv::new(cfg(), 2).unwrap();
    b.reset(&[1, 2]).unwrap();
    let (_, _, _, info) = b.step(&[0, -1, 17, 3, 0, 0, 0, 400]).unwrap();
    assert_eq!(info.invalid_actions, vec![2, 1]);
}

/// Plays back a fixed action list so the native runner and the batch API
/// see the same joint actions.
struct Script {
    actions: Vec<i64>,
    t: usize,
}

impl Policy for Script {
    fn act(&mut self, _obs: &[f32], _rng: &mut Rng) -> i64 {
        let a = self.actions[self.t % self.actions.len()];
        self.t += 1;
        a
    }
    fn name(&self) -> String {
        "script".into()
    }
}

#[test]
fn batch_step_matches_native_runner() {
    let c = GameConfig {
        max_episode_steps: 200,
        ..cfg()
    };
    let mut rng = Rng::new(5);
    let per_agent: Vec<Vec<i64>> = (0..4)
        .map(|_| (0..200).map(|_| rng.below(17) as i64).collect())
        .collect();
    let mut policies: Vec<Box<dyn Policy>> = per_agent
        .iter()
        .map(|a| {
            Box::new(Script {
                actions: a.clone(),
                t: 0,
            }) as Box<dyn Policy>
        })
        .collect();
    let log = run_episode(&c, &ScenarioSpec::plain(), &mut policies, 42, EpisodeOptions::default()).unwrap();

    let mut b = BatchEnv::new(c, 1).unwrap();
    b.reset(&[42]).unwrap();
    for rec in &log.steps {
        let joint: Vec<i64> = rec.actions.iter().map(|a| *a as i64).collect();
        let (_, rewards, _, info) = b.step(&joint).unwrap();
        assert_eq!(rewards, rec.rewards.as_slice());
        assert_eq!(info.events[0], rec.events);
        if !info.episode_ended[0] {
            assert_eq!(craftgrid::digest_state(&b.states()[0]), rec.digest);
        }
    }
}
