//! Fixtures shared by the criterion benches.

use craftgrid::{generate_world, ActionKind, GameConfig, Rng, WorldState};

/// A freshly generated default world with `n_agents` players.
pub fn world(n_agents: usize, seed: u64) -> (GameConfig, WorldState) {
    let cfg = GameConfig {
        n_agents,
        ..GameConfig::default()
    };
    let state = generate_world(&cfg, seed).expect("default config generates");
    (cfg, state)
}

/// Pre-drawn uniform joint actions, `steps × n_agents`, so benches do not
/// time the action source.
pub fn random_actions(n_agents: usize, steps: usize, seed: u64) -> Vec<Vec<ActionKind>> {
    let mut rng = Rng::new(seed);
    (0..steps)
        .map(|_| {
            (0..n_agents)
                .map(|_| ActionKind::ALL[rng.below(ActionKind::COUNT as u64) as usize])
                .collect()
        })
        .collect()
}
