//! Procedural world generation.
//!
//! Terrain comes from thresholded gradient-noise bands (water, sand, grass,
//! mountain with caves and tunnels). A generated map is accepted only if every
//! spawn can reach each resource of the tech tree in tool order; otherwise the
//! map is regenerated from a derived seed, up to `max_attempts` times.

mod noise;

pub use noise::GradientNoise;

use crate::config::GameConfig;
use crate::rng::Rng;
use crate::types::{BlockKind, MobKind, MobState, PlayerState, Pos};
use crate::world::WorldState;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Substream labels used by generation.
mod label {
    pub const ATTEMPT: u64 = 0x5752_4c44;
    pub const CELLS: u64 = 1;
    pub const SPAWNS: u64 = 2;
    pub const MOBS: u64 = 3;
    pub const ENGINE: u64 = 4;
    pub const NOISE: u64 = 5;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TerrainParams {
    /// Radius of the guaranteed grass clearing around the map centre.
    pub clearing_radius: f64,
    /// Octaves `(feature size in cells, weight)` for the water band.
    pub water_octaves: Vec<(f64, f64)>,
    pub mountain_octaves: Vec<(f64, f64)>,
    pub water_level: f64,
    pub sand_level: f64,
    pub mountain_level: f64,
    pub cave_level: f64,
    pub tunnel_level: f64,
    pub tree_density: f64,
    pub coal_density: f64,
    pub iron_density: f64,
    pub diamond_density: f64,
    /// Fraction of deep-mountain cells turned to lava (in noise blobs).
    pub lava_density: f64,
    pub max_attempts: u32,
}

impl Default for TerrainParams {
    fn default() -> Self {
        TerrainParams {
            clearing_radius: 5.0,
            water_octaves: vec![(15.0, 1.0), (5.0, 0.15)],
            mountain_octaves: vec![(15.0, 1.0), (5.0, 0.3)],
            water_level: 0.3,
            sand_level: 0.22,
            mountain_level: 0.15,
            cave_level: 0.25,
            tunnel_level: 0.45,
            tree_density: 0.3,
            coal_density: 0.12,
            iron_density: 0.06,
            diamond_density: 0.015,
            lava_density: 0.15,
            max_attempts: 16,
        }
    }
}

impl TerrainParams {
    pub(crate) fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for (name, d) in [
            ("tree_density", self.tree_density),
            ("coal_density", self.coal_density),
            ("iron_density", self.iron_density),
            ("diamond_density", self.diamond_density),
            ("lava_density", self.lava_density),
        ] {
            if !(0.0..=1.0).contains(&d) {
                out.push((name, "density must be in [0, 1]".to_string()));
            }
        }
        if !(self.diamond_density < self.iron_density && self.iron_density < self.coal_density) {
            out.push((
                "diamond_density",
                "ore densities must satisfy diamond < iron < coal".to_string(),
            ));
        }
        if self.max_attempts == 0 || self.max_attempts > 16 {
            out.push(("max_attempts", "must be in 1..=16".to_string()));
        }
        if self.water_octaves.is_empty() || self.mountain_octaves.is_empty() {
            out.push(("water_octaves", "octave lists must be non-empty".to_string()));
        }
        out
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WorldGenError {
    #[error("no reachable resource layout after {attempts} attempts (last failure: {last})")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("fewer walkable cells ({available}) than agents ({wanted})")]
    NoWalkableCells { available: usize, wanted: usize },
}

/// Generates the initial world for `(cfg, seed)`.
pub fn generate_world(cfg: &GameConfig, seed: u64) -> Result<WorldState, WorldGenError> {
    let root = Rng::new(seed);
    let mut last = String::new();
    for attempt in 0..cfg.terrain.max_attempts {
        let rng = root.substream(label::ATTEMPT).substream(attempt as u64);
        let mut world = WorldState::blank(cfg.map_width, cfg.map_height, BlockKind::Grass, seed);
        world.rng = root.substream(label::ENGINE);
        fill_terrain(&mut world, &cfg.terrain, rng);

        let mut spawn_rng = rng.substream(label::SPAWNS);
        let spawns = match choose_spawns(&world, cfg.n_agents, cfg.min_spawn_distance, &mut spawn_rng) {
            Ok(s) => s,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        if let Some(missing) = spawns.iter().find_map(|&s| missing_resource(&world, s)) {
            last = format!("{missing} unreachable");
            continue;
        }
        world.players = spawns.into_iter().map(PlayerState::spawn).collect();
        place_initial_mobs(&mut world, cfg, rng.substream(label::MOBS));
        world.light_level = crate::engine::daylight(0, cfg.day_length);
        return Ok(world);
    }
    Err(WorldGenError::RetriesExhausted {
        attempts: cfg.terrain.max_attempts,
        last,
    })
}

fn fill_terrain(world: &mut WorldState, t: &TerrainParams, rng: Rng) {
    let noise_root = rng.substream(label::NOISE);
    let n = |z: u64| GradientNoise::new(noise_root.substream(z));
    let water_n = n(0);
    let mountain_n = n(1);
    let sand_n = n(2);
    let tree_n = n(3);
    let cave_n = n(4);
    let tunnel_n = n(5);
    let coal_n = n(6);
    let lava_n = n(7);
    let cells = rng.substream(label::CELLS);

    let (h, w) = (world.height as f64, world.width as f64);
    let (cy, cx) = ((h - 1.0) / 2.0, (w - 1.0) / 2.0);
    for idx in 0..world.tiles.len() {
        let p = world.pos_of(idx);
        let (y, x) = (p.row as f64, p.col as f64);
        let mut u = cells.substream(idx as u64);

        let dist = ((y - cy).powi(2) + (x - cx).powi(2)).sqrt();
        let start = (1.0 - dist / (2.0 * t.clearing_radius)).max(0.0);
        let water = water_n.fractal(x, y, &t.water_octaves) + 0.1 - 2.0 * start;
        let mountain = mountain_n.fractal(x, y, &t.mountain_octaves) - 4.0 * start;

        let block = if start > 0.5 {
            BlockKind::Grass
        } else if mountain > t.mountain_level {
            let (r_coal, r_iron, r_diamond) = (u.next_f64(), u.next_f64(), u.next_f64());
            let cave = cave_n.fractal(x, y, &[(6.0, 1.0)]) > t.cave_level && mountain > 0.3;
            if cave
                || tunnel_n.sample(2.0 * x / 7.0, y / 35.0) > t.tunnel_level
                || tunnel_n.sample(x / 35.0 + 40.0, 2.0 * y / 7.0) > t.tunnel_level
            {
                BlockKind::Path
            } else if coal_n.fractal(x, y, &[(8.0, 1.0)]) > 0.0 && r_coal < 2.0 * t.coal_density {
                BlockKind::CoalOre
            } else if r_iron < t.iron_density {
                BlockKind::IronOre
            } else if mountain > 0.18 && r_diamond < t.diamond_density {
                BlockKind::DiamondOre
            } else if mountain > 0.3 && (lava_n.fractal(x, y, &[(5.0, 1.0)]) + 1.0) / 2.0 < t.lava_density {
                BlockKind::Lava
            } else {
                BlockKind::Stone
            }
        } else if water > t.sand_level && water <= t.water_level + 0.05 && sand_n.fractal(x, y, &[(9.0, 1.0)]) > -0.2 {
            BlockKind::Sand
        } else if water > t.water_level {
            BlockKind::Water
        } else if tree_n.fractal(x, y, &[(7.0, 1.0)]) > 0.0 && u.next_f64() < t.tree_density {
            BlockKind::Tree
        } else {
            BlockKind::Grass
        };
        world.tiles[idx] = block;
    }
}

/// Picks `n` distinct walkable spawn cells, preferring grass.
///
/// Cells are sampled at random subject to a pairwise Chebyshev distance of
/// at least `min_distance`. When that cannot be met, falls back to greedy
/// farthest-point placement, which never fails while enough cells exist.
pub fn choose_spawns(
    world: &WorldState,
    n: usize,
    min_distance: u16,
    rng: &mut Rng,
) -> Result<Vec<Pos>, WorldGenError> {
    let walkable = |b: BlockKind| matches!(b, BlockKind::Grass | BlockKind::Sand | BlockKind::Path);
    let free = |i: usize| world.mob_at(world.pos_of(i)).is_none();
    let mut candidates: Vec<Pos> = (0..world.tiles.len())
        .filter(|&i| world.tiles[i] == BlockKind::Grass && free(i))
        .map(|i| world.pos_of(i))
        .collect();
    if candidates.len() < n {
        candidates = (0..world.tiles.len())
            .filter(|&i| walkable(world.tiles[i]) && free(i))
            .map(|i| world.pos_of(i))
            .collect();
    }
    if candidates.len() < n || n == 0 {
        return Err(WorldGenError::NoWalkableCells {
            available: candidates.len(),
            wanted: n,
        });
    }

    let min = min_distance as i32;
    let mut chosen: Vec<Pos> = Vec::with_capacity(n);
    'outer: for _ in 0..n {
        for _ in 0..256 {
            let c = candidates[rng.below(candidates.len() as u64) as usize];
            if chosen.iter().all(|&o| o.chebyshev(c) >= min && o != c) {
                chosen.push(c);
                continue 'outer;
            }
        }
        break;
    }
    if chosen.len() == n {
        return Ok(chosen);
    }

    // Farthest-point fallback.
    let mut chosen = vec![candidates[rng.below(candidates.len() as u64) as usize]];
    while chosen.len() < n {
        let best = candidates
            .iter()
            .copied()
            .filter(|c| !chosen.contains(c))
            .max_by_key(|c| {
                let d = chosen.iter().map(|o| o.chebyshev(*c)).min().unwrap_or(0);
                // Prefer the earliest row-major cell among ties.
                (d, std::cmp::Reverse(*c))
            })
            .expect("enough candidates");
        chosen.push(best);
    }
    Ok(chosen)
}

/// First resource of the tech tree that `spawn` cannot reach, if any.
///
/// Reachability is staged in tool order: bare hands may walk and chop trees;
/// a wood pickaxe opens stone and coal; a stone pickaxe opens iron. Water and
/// lava are never crossed. A block counts as reached when it is adjacent to a
/// reached passable cell.
pub fn missing_resource(world: &WorldState, spawn: Pos) -> Option<&'static str> {
    use BlockKind::*;
    let stage0 = |b: BlockKind| matches!(b, Grass | Sand | Path | Tree);
    let stage1 = |b: BlockKind| stage0(b) || matches!(b, Stone | CoalOre);
    let stage2 = |b: BlockKind| stage1(b) || b == IronOre;

    let touched0 = flood_touch(world, spawn, stage0);
    for (b, name) in [(Tree, "tree"), (Water, "water"), (Stone, "stone")] {
        if !touched0[b.index()] {
            return Some(name);
        }
    }
    if flood_grass_cells(world, spawn, stage0) < 8 {
        return Some("grass");
    }
    let touched1 = flood_touch(world, spawn, stage1);
    for (b, name) in [(CoalOre, "coal_ore"), (IronOre, "iron_ore")] {
        if !touched1[b.index()] {
            return Some(name);
        }
    }
    let touched2 = flood_touch(world, spawn, stage2);
    if !touched2[DiamondOre.index()] {
        return Some("diamond_ore");
    }
    None
}

fn flood(world: &WorldState, spawn: Pos, passable: impl Fn(BlockKind) -> bool) -> Vec<bool> {
    let mut seen = vec![false; world.tiles.len()];
    let mut queue = VecDeque::new();
    seen[world.idx(spawn)] = true;
    queue.push_back(spawn);
    while let Some(p) = queue.pop_front() {
        for d in crate::types::Direction::ALL {
            let q = p.step(d);
            if !world.in_bounds(q) {
                continue;
            }
            let i = world.idx(q);
            if !seen[i] && passable(world.tiles[i]) {
                seen[i] = true;
                queue.push_back(q);
            }
        }
    }
    seen
}

fn flood_touch(world: &WorldState, spawn: Pos, passable: impl Fn(BlockKind) -> bool) -> [bool; BlockKind::COUNT] {
    let seen = flood(world, spawn, passable);
    let mut touched = [false; BlockKind::COUNT];
    for (i, _) in seen.iter().enumerate().filter(|(_, s)| **s) {
        let p = world.pos_of(i);
        touched[world.tiles[i].index()] = true;
        for d in crate::types::Direction::ALL {
            let q = p.step(d);
            if world.in_bounds(q) {
                touched[world.tile(q).index()] = true;
            }
        }
    }
    touched
}

fn flood_grass_cells(world: &WorldState, spawn: Pos, passable: impl Fn(BlockKind) -> bool) -> usize {
    flood(world, spawn, passable)
        .iter()
        .enumerate()
        .filter(|(i, s)| **s && world.tiles[*i] == BlockKind::Grass)
        .count()
}

fn place_initial_mobs(world: &mut WorldState, cfg: &GameConfig, mut rng: Rng) {
    let m = &cfg.mobs;
    let plan = [
        (MobKind::Cow, m.initial_cows, BlockKind::Grass),
        (MobKind::Zombie, m.initial_zombies, BlockKind::Grass),
        (MobKind::Skeleton, m.initial_skeletons, BlockKind::Path),
    ];
    let len = world.tiles.len() as u64;
    for (kind, count, habitat) in plan {
        let mut placed = 0;
        let mut tries = 0;
        while placed < count && tries < 2000 {
            tries += 1;
            let p = world.pos_of(rng.below(len) as usize);
            if world.tile(p) != habitat || world.occupied(p) {
                continue;
            }
            let near = world
                .players
                .iter()
                .map(|pl| pl.pos.chebyshev(p))
                .min()
                .unwrap_or(i32::MAX);
            if near < m.spawn_min_distance as i32 {
                continue;
            }
            world.mobs.push(MobState::new(kind, p));
            placed += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_world() {
        let cfg = GameConfig::default();
        let a = generate_world(&cfg, 7).unwrap();
        let b = generate_world(&cfg, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.tiles, generate_world(&cfg, 8).unwrap().tiles);
    }

    #[test]
    fn zero_tree_density_fails() {
        let mut cfg = GameConfig::default();
        cfg.terrain.tree_density = 0.0;
        let err = generate_world(&cfg, 1).unwrap_err();
        assert!(
            matches!(err, WorldGenError::RetriesExhausted { attempts: 16, .. }),
            "{err}"
        );
    }

    #[test]
    fn single_spawn() {
        let w = WorldState::blank(10, 10, BlockKind::Grass, 0);
        let s = choose_spawns(&w, 1, 4, &mut Rng::new(0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(w.tile(s[0]).player_walkable());
    }

    #[test]
    fn impossible_distance_falls_back() {
        let w = WorldState::blank(10, 10, BlockKind::Grass, 0);
        let s = choose_spawns(&w, 4, 500, &mut Rng::new(3)).unwrap();
        assert_eq!(s.len(), 4);
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
        // Farthest-point placement on an empty 10x10 reaches the corners.
        let min_pair = (0..4)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| s[i].chebyshev(s[j]))
            .min()
            .unwrap();
        assert!(min_pair >= 4, "{s:?}");
    }

    #[test]
    fn no_walkable_cells() {
        let w = WorldState::blank(10, 10, BlockKind::Water, 0);
        assert_eq!(
            choose_spawns(&w, 2, 4, &mut Rng::new(0)),
            Err(WorldGenError::NoWalkableCells {
                available: 0,
                wanted: 2
            })
        );
    }

    #[test]
    fn reachability_staging() {
        let map = "\
.....~
.T0..#
#####c
iiiii#
dddddd
";
        let w = WorldState::from_text_map(map, 0).unwrap();
        // Diamond is behind iron, iron behind stone: reachable in tool order.
        assert_eq!(missing_resource(&w, Pos::new(1, 2)), None);
        let walled = "\
.........~
.T0......#
##########
cccccccccc
%%%%%%%%%%
iiiiiiiiii
dddddddddd
";
        let w = WorldState::from_text_map(walled, 0).unwrap();
        assert_eq!(missing_resource(&w, Pos::new(1, 2)), Some("iron_ore"));
    }
}
