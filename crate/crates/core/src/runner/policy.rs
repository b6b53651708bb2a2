//! The policy interface and the scripted policies shipped with the crate.
//!
//! Scripted policies only read the observation vector, like any external
//! learner would.

use crate::config::GameConfig;
use crate::engine::recipes::{recipe_for, Product};
use crate::engine::ActionKind;
use crate::observation::MAP_CHANNELS;
use crate::rng::Rng;
use crate::types::{BlockKind, Direction, Item, MobKind, MAX_LEVEL};
use std::collections::VecDeque;

/// What a trainable policy is shown after each step.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<'a> {
    pub agent: usize,
    pub obs: &'a [f32],
    pub action: ActionKind,
    pub reward: f32,
    pub done: bool,
    pub next_obs: &'a [f32],
}

pub trait Policy: Send {
    /// Picks an action index; anything outside `[0, 17)` is treated as NOOP
    /// and counted as invalid.
    fn act(&mut self, obs: &[f32], rng: &mut Rng) -> i64;

    /// Called before each episode.
    fn reset(&mut self) {}

    /// Frozen policies never receive [`learn`](Policy::learn) calls.
    fn is_frozen(&self) -> bool {
        true
    }

    fn learn(&mut self, _t: &Transition<'_>) {}

    fn name(&self) -> String;
}

/// Uniform over all 17 actions.
#[derive(Clone, Debug, Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn act(&mut self, _obs: &[f32], rng: &mut Rng) -> i64 {
        rng.below(ActionKind::COUNT as u64) as i64
    }

    fn name(&self) -> String {
        "random".into()
    }
}

#[derive(Clone, Debug, Default)]
pub struct NoopPolicy;

impl Policy for NoopPolicy {
    fn act(&mut self, _obs: &[f32], _rng: &mut Rng) -> i64 {
        ActionKind::Noop as i64
    }

    fn name(&self) -> String {
        "noop".into()
    }
}

pub fn random_policy() -> Box<dyn Policy> {
    Box::new(RandomPolicy)
}

pub fn noop_policy() -> Box<dyn Policy> {
    Box::new(NoopPolicy)
}

pub fn survivor_policy(cfg: &GameConfig) -> Box<dyn Policy> {
    Box::new(ScriptedPolicy::new(cfg, false))
}

/// Scripted stand-in for a trained expert: survives like the survivor
/// policy and also climbs the tech tree towards diamonds.
pub fn expert_policy(cfg: &GameConfig) -> Box<dyn Policy> {
    Box::new(ScriptedPolicy::new(cfg, true))
}

/// Looks a policy up by its CLI name.
pub fn policy_by_name(name: &str, cfg: &GameConfig) -> Option<Box<dyn Policy>> {
    match name {
        "random" => Some(random_policy()),
        "noop" => Some(noop_policy()),
        "survivor" => Some(survivor_policy(cfg)),
        "expert" => Some(expert_policy(cfg)),
        _ => None,
    }
}

/// Read access to the parts of an observation the scripted policies use.
pub struct ObsView<'a> {
    obs: &'a [f32],
    rows: usize,
    cols: usize,
}

impl<'a> ObsView<'a> {
    pub fn new(cfg: &GameConfig, obs: &'a [f32]) -> Self {
        Self::with_window(cfg.view_rows as usize, cfg.view_cols as usize, obs)
    }

    pub fn with_window(rows: usize, cols: usize, obs: &'a [f32]) -> Self {
        ObsView { obs, rows, cols }
    }

    fn centre(&self) -> (i32, i32) {
        (self.rows as i32 / 2, self.cols as i32 / 2)
    }

    fn channel(&self, r: i32, c: i32, ch: usize) -> bool {
        if r < 0 || c < 0 || r as usize >= self.rows || c as usize >= self.cols {
            return false;
        }
        self.obs[(r as usize * self.cols + c as usize) * MAP_CHANNELS + ch] > 0.5
    }

    /// Block at window offset `(dr, dc)` from the centre.
    pub fn block(&self, dr: i32, dc: i32) -> BlockKind {
        let (cr, cc) = self.centre();
        BlockKind::ALL
            .into_iter()
            .find(|b| self.channel(cr + dr, cc + dc, b.index()))
            .unwrap_or(BlockKind::Darkness)
    }

    pub fn mob(&self, dr: i32, dc: i32) -> Option<MobKind> {
        let (cr, cc) = self.centre();
        MobKind::ALL
            .into_iter()
            .find(|&k| self.channel(cr + dr, cc + dc, BlockKind::COUNT + k as usize))
    }

    pub fn player(&self, dr: i32, dc: i32) -> bool {
        let (cr, cc) = self.centre();
        self.channel(cr + dr, cc + dc, BlockKind::COUNT + 4)
    }

    fn stats_offset(&self) -> usize {
        self.rows * self.cols * MAP_CHANNELS
    }

    pub fn item(&self, item: Item) -> u8 {
        (self.obs[self.stats_offset() + item as usize] * 10.0).round() as u8
    }

    /// Health, food, drink, energy, each in `[0, 9]` (health rounded down).
    pub fn intrinsics(&self) -> [u8; 4] {
        let o = self.stats_offset() + Item::COUNT;
        [0, 1, 2, 3].map(|i| (self.obs[o + i] * 10.0 + 1e-3) as u8)
    }

    pub fn direction(&self) -> Direction {
        let o = self.stats_offset() + Item::COUNT + 4;
        (0..4)
            .find(|&i| self.obs[o + i] > 0.5)
            .and_then(|i| Direction::from_index(i as u8))
            .unwrap_or(Direction::Down)
    }

    fn in_window(&self, dr: i32, dc: i32) -> bool {
        let (cr, cc) = self.centre();
        dr.abs() <= cr && dc.abs() <= cc
    }

    fn walkable(&self, dr: i32, dc: i32) -> bool {
        self.block(dr, dc).player_walkable()
            && self.block(dr, dc) != BlockKind::Lava
            && self.mob(dr, dc).is_none()
            && !self.player(dr, dc)
    }

    /// Breadth-first search over safe walkable cells for the nearest cell
    /// satisfying `goal` that can be faced from a reached cell. Returns the
    /// first direction to take, or the direction to face when already
    /// adjacent, plus whether the goal is adjacent.
    pub fn route(&self, goal: impl Fn(i32, i32) -> bool) -> Option<(Direction, bool)> {
        for d in Direction::ALL {
            let (dr, dc) = d.delta();
            if goal(dr, dc) {
                return Some((d, true));
            }
        }
        let mut seen = vec![false; self.rows * self.cols];
        let (cr, cc) = self.centre();
        let key = |dr: i32, dc: i32| ((dr + cr) as usize) * self.cols + (dc + cc) as usize;
        seen[key(0, 0)] = true;
        let mut queue = VecDeque::new();
        for d in Direction::ALL {
            let (dr, dc) = d.delta();
            if self.walkable(dr, dc) {
                seen[key(dr, dc)] = true;
                queue.push_back((dr, dc, d));
            }
        }
        while let Some((r, c, first)) = queue.pop_front() {
            for d in Direction::ALL {
                let (dr, dc) = d.delta();
                let (nr, nc) = (r + dr, c + dc);
                if !self.in_window(nr, nc) || seen[key(nr, nc)] {
                    continue;
                }
                if goal(nr, nc) {
                    return Some((first, false));
                }
                if self.walkable(nr, nc) {
                    seen[key(nr, nc)] = true;
                    queue.push_back((nr, nc, first));
                }
            }
        }
        None
    }
}

/// Heuristic survivor, optionally also progressing through the tech tree.
pub struct ScriptedPolicy {
    rows: usize,
    cols: usize,
    station_radius: i32,
    climb: bool,
    heading: Direction,
}

impl ScriptedPolicy {
    pub fn new(cfg: &GameConfig, climb: bool) -> Self {
        ScriptedPolicy {
            rows: cfg.view_rows as usize,
            cols: cfg.view_cols as usize,
            station_radius: cfg.station_radius as i32,
            climb,
            heading: Direction::Down,
        }
    }

    fn move_action(d: Direction) -> ActionKind {
        match d {
            Direction::Up => ActionKind::Up,
            Direction::Down => ActionKind::Down,
            Direction::Left => ActionKind::Left,
            Direction::Right => ActionKind::Right,
        }
    }

    /// Walk towards the nearest matching cell and DO on it once faced.
    fn seek(&self, v: &ObsView, goal: impl Fn(i32, i32) -> bool) -> Option<ActionKind> {
        let (d, adjacent) = v.route(goal)?;
        Some(if adjacent && v.direction() == d {
            ActionKind::Do
        } else {
            Self::move_action(d)
        })
    }

    fn seek_block(&self, v: &ObsView, block: BlockKind) -> Option<ActionKind> {
        self.seek(v, |r, c| v.block(r, c) == block && v.mob(r, c).is_none())
    }

    fn explore(&mut self, v: &ObsView, rng: &mut Rng) -> ActionKind {
        let (dr, dc) = self.heading.delta();
        if rng.chance(0.1) || !v.walkable(dr, dc) {
            let open: Vec<Direction> = Direction::ALL
                .into_iter()
                .filter(|d| {
                    let (r, c) = d.delta();
                    v.walkable(r, c)
                })
                .collect();
            self.heading = if open.is_empty() {
                Direction::ALL[rng.below(4) as usize]
            } else {
                open[rng.below(open.len() as u64) as usize]
            };
        }
        Self::move_action(self.heading)
    }

    fn station_near(&self, v: &ObsView, block: BlockKind) -> bool {
        let r = self.station_radius;
        (-r..=r).any(|dr| (-r..=r).any(|dc| v.block(dr, dc) == block))
    }

    /// Turn to a free neighbour that accepts a placement, then place.
    fn place(&self, v: &ObsView, action: ActionKind) -> Option<ActionKind> {
        let recipe = recipe_for(action)?;
        let ok = |d: Direction| {
            let (r, c) = d.delta();
            recipe.targets.contains(&v.block(r, c))
                && v.block(r, c) != BlockKind::Water
                && v.mob(r, c).is_none()
                && !v.player(r, c)
        };
        if ok(v.direction()) {
            return Some(action);
        }
        Direction::ALL.into_iter().find(|&d| ok(d)).map(Self::move_action)
    }

    fn gather(&mut self, v: &ObsView, item: Item, rng: &mut Rng) -> ActionKind {
        let block = match item {
            Item::Wood => BlockKind::Tree,
            Item::Stone => BlockKind::Stone,
            Item::Coal => BlockKind::CoalOre,
            Item::Iron => BlockKind::IronOre,
            Item::Diamond => BlockKind::DiamondOre,
            _ => BlockKind::Grass,
        };
        self.seek_block(v, block).unwrap_or_else(|| self.explore(v, rng))
    }

    /// Works towards crafting `action`: gather inputs, place stations, make.
    fn craft(&mut self, v: &ObsView, action: ActionKind, rng: &mut Rng) -> ActionKind {
        let recipe = recipe_for(action).expect("craft recipe");
        let table = self.station_near(v, BlockKind::CraftingTable);
        let furnace = self.station_near(v, BlockKind::Furnace);
        let extra_wood = if recipe.needs_table && !table { 2 } else { 0 };
        let extra_stone = if recipe.needs_furnace && !furnace { 1 } else { 0 };
        for &(item, n) in recipe.cost {
            let need = n + if item == Item::Wood {
                extra_wood
            } else if item == Item::Stone {
                extra_stone
            } else {
                0
            };
            if v.item(item) < need {
                return self.gather(v, item, rng);
            }
        }
        if extra_stone > 0 && v.item(Item::Stone) < 1 {
            return self.gather(v, Item::Stone, rng);
        }
        if recipe.needs_table && !table {
            return self
                .place(v, ActionKind::PlaceTable)
                .unwrap_or_else(|| self.explore(v, rng));
        }
        if recipe.needs_furnace && !furnace {
            return self
                .place(v, ActionKind::PlaceFurnace)
                .unwrap_or_else(|| self.explore(v, rng));
        }
        action
    }

    fn decide(&mut self, v: &ObsView, rng: &mut Rng) -> ActionKind {
        let [health, food, drink, energy] = v.intrinsics();
        for d in Direction::ALL {
            let (r, c) = d.delta();
            if matches!(v.mob(r, c), Some(MobKind::Zombie | MobKind::Skeleton)) {
                return if v.direction() == d {
                    ActionKind::Do
                } else {
                    Self::move_action(d)
                };
            }
        }
        let threat = (-2..=2)
            .flat_map(|r| (-2..=2).map(move |c| (r, c)))
            .find(|&(r, c)| v.mob(r, c) == Some(MobKind::Zombie));
        if let Some((r, c)) = threat {
            if health < 5 {
                let away = Direction::toward(crate::types::Pos::new(r, c), crate::types::Pos::new(0, 0));
                if let Some(d) = away {
                    return Self::move_action(d);
                }
            }
        }
        if drink < 5 {
            if let Some(a) = self.seek_block(v, BlockKind::Water) {
                return a;
            }
        }
        if food < 5 {
            if let Some(a) = self.seek(v, |r, c| {
                v.mob(r, c) == Some(MobKind::Cow) || v.block(r, c) == BlockKind::PlantRipe
            }) {
                return a;
            }
        }
        if energy < 3 {
            return ActionKind::Sleep;
        }
        if !self.climb {
            if v.item(Item::Wood) < 5 {
                return self.gather(v, Item::Wood, rng);
            }
            return self.explore(v, rng);
        }
        if v.item(Item::Sapling) > 0 {
            if let Some(a) = self.place(v, ActionKind::PlacePlant) {
                return a;
            }
        }
        let goals = [
            (Item::WoodPickaxe, ActionKind::MakeWoodPickaxe),
            (Item::WoodSword, ActionKind::MakeWoodSword),
            (Item::StonePickaxe, ActionKind::MakeStonePickaxe),
            (Item::StoneSword, ActionKind::MakeStoneSword),
            (Item::IronPickaxe, ActionKind::MakeIronPickaxe),
            (Item::IronSword, ActionKind::MakeIronSword),
        ];
        for (item, action) in goals {
            if v.item(item) == 0 {
                debug_assert!(matches!(recipe_for(action).map(|r| r.product), Some(Product::Item(_))));
                return self.craft(v, action, rng);
            }
        }
        if v.item(Item::Diamond) == 0 {
            return self.gather(v, Item::Diamond, rng);
        }
        if drink < MAX_LEVEL {
            if let Some(a) = self.seek_block(v, BlockKind::Water) {
                return a;
            }
        }
        self.explore(v, rng)
    }
}

impl Policy for ScriptedPolicy {
    fn act(&mut self, obs: &[f32], rng: &mut Rng) -> i64 {
        let v = ObsView::with_window(self.rows, self.cols, obs);
        self.decide(&v, rng) as i64
    }

    fn reset(&mut self) {
        self.heading = Direction::Down;
    }

    fn name(&self) -> String {
        if self.climb { "expert" } else { "survivor" }.into()
    }
}
