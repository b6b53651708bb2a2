use craftgrid::engine::{resolve_cell_conflicts, step, Intent, StepEvent};
use craftgrid::observation::{is_visible, MAP_CHANNELS};
use craftgrid::types::{MAX_HEALTH_HALVES, MAX_LEVEL};
use craftgrid::{
    digest_state, encode_symbolic, generate_world, obs_manifest, ActionKind, BlockKind, GameConfig, Item, Pos, Rng,
    WorldState,
};
use proptest::prelude::*;

fn cfg(n: usize) -> GameConfig {
    GameConfig {
        n_agents: n,
        map_width: 32,
        map_height: 32,
        ..GameConfig::default()
    }
}

fn action() -> impl Strategy<Value = ActionKind> {
    (0u8..17).prop_map(|i| ActionKind::from_index(i).unwrap())
}

fn joint_actions(n: usize, len: usize) -> impl Strategy<Value = Vec<Vec<ActionKind>>> {
    prop::collection::vec(prop::collection::vec(action(), n), 1..len)
}

fn check_ranges(s: &WorldState) -> Result<(), TestCaseError> {
    for p in &s.players {
        prop_assert!(p.health_halves <= MAX_HEALTH_HALVES);
        prop_assert!(p.food <= MAX_LEVEL && p.drink <= MAX_LEVEL && p.energy <= MAX_LEVEL);
        for item in Item::ALL {
            prop_assert!(p.inventory.get(item) <= 9);
        }
        prop_assert_eq!(p.alive, p.health_halves > 0);
        if p.alive {
            prop_assert!(s.tile(p.pos).player_walkable(), "player on {:?}", s.tile(p.pos));
        }
    }
    let alive: Vec<Pos> = s.players.iter().filter(|p| p.alive).map(|p| p.pos).collect();
    for (i, a) in alive.iter().enumerate() {
        prop_assert!(!alive[i + 1..].contains(a), "two players share {:?}", a);
        prop_assert!(s.mob_at(*a).is_none());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn state_stays_in_range(seed in any::<u64>(), actions in joint_actions(3, 150)) {
        let c = cfg(3);
        let mut s = generate_world(&c, seed).unwrap();
        for a in &actions {
            if step(&c, &mut s, a).is_err() {
                break;
            }
            check_ranges(&s)?;
        }
    }

    #[test]
    fn rewards_equal_unlocks_plus_health_change(seed in any::<u64>(), actions in joint_actions(3, 150)) {
        let c = cfg(3);
        let mut s = generate_world(&c, seed).unwrap();
        for a in &actions {
            let before: Vec<i32> = s.players.iter().map(|p| p.health_halves as i32).collect();
            let Ok(r) = step(&c, &mut s, a) else { break };
            for (i, &prev) in before.iter().enumerate() {
                let unlocks = r.events.iter().filter(|e| matches!(e, StepEvent::AchievementUnlocked { agent, .. } if *agent as usize == i)).count() as i32;
                let delta = s.players[i].health_halves as i32 - prev;
                let expected = unlocks as f64 + 0.1 * (delta as f64 / 2.0);
                prop_assert!((r.rewards[i] as f64 - expected).abs() < 1e-6, "agent {} got {} expected {}", i, r.rewards[i], expected);
            }
        }
    }

    #[test]
    fn observations_follow_the_manifest(seed in any::<u64>(), actions in joint_actions(4, 60)) {
        let c = cfg(4);
        let m = obs_manifest(&c);
        let mut s = generate_world(&c, seed).unwrap();
        let mut o = vec![0.0f32; m.total_len];
        for a in &actions {
            if step(&c, &mut s, a).is_err() {
                break;
            }
            for agent in 0..4 {
                encode_symbolic(&c, &s, agent, &mut o);
                prop_assert!(o.iter().all(|v| (0.0..=1.0).contains(v)));
                let map = m.block("map").unwrap();
                prop_assert_eq!(map.len, 63 * MAP_CHANNELS);
                for cell in 0..63 {
                    let ch = &o[cell * MAP_CHANNELS..cell * MAP_CHANNELS + BlockKind::COUNT];
                    prop_assert_eq!(ch.iter().filter(|&&v| v == 1.0).count(), 1);
                    prop_assert_eq!(ch.iter().filter(|&&v| v != 0.0).count(), 1);
                }
                let dir = m.block("direction").unwrap();
                prop_assert_eq!(o[dir.offset..dir.offset + 4].iter().sum::<f32>(), 1.0);
            }
        }
    }

    #[test]
    fn visibility_is_symmetric_without_experts(seed in any::<u64>(), actions in joint_actions(4, 80)) {
        let c = cfg(4);
        let mut s = generate_world(&c, seed).unwrap();
        for a in &actions {
            if step(&c, &mut s, a).is_err() {
                break;
            }
            for i in 0..4 {
                prop_assert!(!is_visible(&c, &s, i, i));
                // A dead target is never visible, so symmetry only holds
                // between living agents.
                for j in (0..4).filter(|&j| s.players[i].alive && s.players[j].alive) {
                    prop_assert_eq!(is_visible(&c, &s, i, j), is_visible(&c, &s, j, i));
                }
            }
        }
    }

    #[test]
    fn conflicts_have_exactly_one_winner_per_cell(
        seed in any::<u64>(),
        targets in prop::collection::vec((0i32..3, 0i32..3), 1..8),
    ) {
        let intents: Vec<Intent> = targets
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| Intent { agent: i as u8, target: Pos::new(r, c), action: ActionKind::Do })
            .collect();
        let res = resolve_cell_conflicts(&intents, &Rng::new(seed), 3);
        let mut cells: Vec<Pos> = intents.iter().map(|i| i.target).collect();
        cells.sort();
        cells.dedup();
        prop_assert_eq!(res.winners.len(), cells.len());
        prop_assert_eq!(res.winners.len() + res.losers.len(), intents.len());
        for (cell, agent) in &res.winners {
            prop_assert_eq!(intents[*agent as usize].target, *cell);
            prop_assert!(!res.losers.contains(agent));
        }
    }

    #[test]
    fn stepping_is_deterministic(seed in any::<u64>(), actions in joint_actions(2, 100)) {
        let c = cfg(2);
        let run = || {
            let mut s = generate_world(&c, seed).unwrap();
            let mut events = Vec::new();
            for a in &actions {
                match step(&c, &mut s, a) {
                    Ok(r) => events.push(r.events),
                    Err(_) => break,
                }
            }
            (digest_state(&s), events)
        };
        prop_assert_eq!(run(), run());
    }
}
