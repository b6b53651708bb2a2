//! Shared fixtures: a hand-authored map and a goal-directed walker that
//! drives one agent through the whole tech tree.

#![allow(dead_code)]

use craftgrid::engine::{step, StepEvent};
use craftgrid::{Achievement, ActionKind, BlockKind, Direction, GameConfig, Item, MobConfig, MobKind, Pos, WorldState};
use std::collections::VecDeque;

/// Trees top left, a lake top right, an ore seam along row 7 with a
/// skeleton walled into a one-cell tunnel at its east end, two cows and a
/// zombie loose on the meadow.
pub const WALKTHROUGH_MAP: &str = "\
TTTT........~~~~~~~~
TTTT........~~~~~~~~
TT..........~~~~~~~~
....................
......0.............
...C......Z...C.....
....................
#c#c#i#i#d#######K##
####################
";

pub fn walkthrough_config() -> GameConfig {
    GameConfig {
        n_agents: 1,
        mobs: MobConfig::disabled(),
        ..GameConfig::default()
    }
}

pub struct Walker {
    pub cfg: GameConfig,
    pub state: WorldState,
    pub events: Vec<StepEvent>,
    pub rewards: Vec<f32>,
    pub steps: usize,
}

fn move_action(d: Direction) -> ActionKind {
    match d {
        Direction::Up => ActionKind::Up,
        Direction::Down => ActionKind::Down,
        Direction::Left => ActionKind::Left,
        Direction::Right => ActionKind::Right,
    }
}

impl Walker {
    pub fn new(cfg: GameConfig, state: WorldState) -> Self {
        Walker {
            cfg,
            state,
            events: Vec::new(),
            rewards: Vec::new(),
            steps: 0,
        }
    }

    pub fn item(&self, item: Item) -> u8 {
        self.state.players[0].inventory.get(item)
    }

    pub fn has(&self, a: Achievement) -> bool {
        self.state.players[0].achievements.contains(a)
    }

    pub fn act(&mut self, a: ActionKind) {
        let r = step(&self.cfg, &mut self.state, &[a]).expect("walkthrough step");
        self.events.extend(r.events);
        self.rewards.push(r.rewards[0]);
        self.steps += 1;
        assert!(self.state.players[0].alive, "walker died at step {}", self.steps);
    }

    fn free(&self, p: Pos) -> bool {
        let b = self.state.tile(p);
        b.player_walkable() && b != BlockKind::Lava && self.state.mob_at(p).is_none()
    }

    /// Next action towards doing something to a cell matching `target`:
    /// DO if facing one, otherwise turn to an adjacent one, otherwise the
    /// first step of a shortest walk to a cell next to one.
    pub fn toward(&self, target: impl Fn(&WorldState, Pos) -> bool, act: ActionKind) -> Option<ActionKind> {
        let me = &self.state.players[0];
        if target(&self.state, me.facing()) {
            return Some(act);
        }
        for d in Direction::ALL {
            let n = me.pos.step(d);
            if target(&self.state, n) && !self.free(n) {
                return Some(move_action(d));
            }
        }
        let mut seen = vec![false; self.state.tiles.len()];
        seen[self.state.idx(me.pos)] = true;
        let mut queue = VecDeque::new();
        for d in Direction::ALL {
            let n = me.pos.step(d);
            if self.state.in_bounds(n) && self.free(n) {
                seen[self.state.idx(n)] = true;
                queue.push_back((n, d));
            }
        }
        while let Some((p, first)) = queue.pop_front() {
            for d in Direction::ALL {
                let n = p.step(d);
                if !self.state.in_bounds(n) {
                    continue;
                }
                if target(&self.state, n) {
                    return Some(move_action(first));
                }
                if !seen[self.state.idx(n)] && self.free(n) {
                    seen[self.state.idx(n)] = true;
                    queue.push_back((n, first));
                }
            }
        }
        None
    }

    /// First step towards any free cell within Chebyshev `radius` of `centre`.
    pub fn toward_area(&self, centre: Pos, radius: i32) -> Option<ActionKind> {
        let me = self.state.players[0].pos;
        if me.chebyshev(centre) <= radius {
            return None;
        }
        self.toward(
            |s, p| p.chebyshev(centre) <= radius && s.tile(p).player_walkable() && s.mob_at(p).is_none(),
            ActionKind::Noop,
        )
        .filter(|a| *a != ActionKind::Noop)
    }

    /// Handles threats and needs; returns an action when one is pressing.
    fn reflex(&self) -> Option<ActionKind> {
        let me = &self.state.players[0];
        let zombie_near = self
            .state
            .mobs
            .iter()
            .any(|m| m.kind == MobKind::Zombie && m.pos.chebyshev(me.pos) <= 2);
        if zombie_near {
            return self.toward(
                |s, p| s.mob_at(p).is_some_and(|m| s.mobs[m].kind == MobKind::Zombie),
                ActionKind::Do,
            );
        }
        if me.drink <= 3 {
            return self.toward(|s, p| s.tile(p) == BlockKind::Water, ActionKind::Do);
        }
        if me.food <= 3 {
            return self.toward(
                |s, p| s.mob_at(p).is_some_and(|m| s.mobs[m].kind == MobKind::Cow),
                ActionKind::Do,
            );
        }
        None
    }

    /// Repeats `plan` (after reflexes) until `done` holds.
    pub fn until(&mut self, what: &str, done: impl Fn(&Walker) -> bool, plan: impl Fn(&Walker) -> Option<ActionKind>) {
        let start = self.steps;
        while !done(self) {
            assert!(
                self.steps - start < 600,
                "walkthrough stuck on {what} after {} steps",
                self.steps
            );
            let a = self.reflex().or_else(|| plan(self)).unwrap_or(ActionKind::Noop);
            self.act(a);
        }
    }

    fn station(&self, kind: BlockKind) -> Option<Pos> {
        (0..self.state.tiles.len())
            .find(|&i| self.state.tiles[i] == kind)
            .map(|i| self.state.pos_of(i))
    }
}

fn is_block(b: BlockKind) -> impl Fn(&WorldState, Pos) -> bool {
    move |s, p| s.tile(p) == b && s.mob_at(p).is_none()
}

fn is_mob(k: MobKind) -> impl Fn(&WorldState, Pos) -> bool {
    move |s, p| s.mob_at(p).is_some_and(|m| s.mobs[m].kind == k)
}

fn placeable(s: &WorldState, p: Pos) -> bool {
    matches!(s.tile(p), BlockKind::Grass | BlockKind::Sand | BlockKind::Path) && !s.occupied(p)
}

/// Plays the walkthrough to completion and returns the walker.
pub fn run_walkthrough() -> Walker {
    let cfg = walkthrough_config();
    let state = WorldState::from_text_map(WALKTHROUGH_MAP, 2024).expect("fixture map parses");
    let mut w = Walker::new(cfg, state);

    w.until(
        "wood",
        |w| w.item(Item::Wood) >= 9,
        |w| w.toward(is_block(BlockKind::Tree), ActionKind::Do),
    );
    w.until(
        "sapling",
        |w| w.item(Item::Sapling) >= 1,
        |w| w.toward(|s, p| placeable(s, p) && s.tile(p) == BlockKind::Grass, ActionKind::Do),
    );
    w.until(
        "plant",
        |w| w.has(Achievement::PlacePlant),
        |w| {
            w.toward(
                |s, p| placeable(s, p) && s.tile(p) == BlockKind::Grass,
                ActionKind::PlacePlant,
            )
        },
    );
    w.until(
        "drink",
        |w| w.state.players[0].drink >= 9 && w.has(Achievement::CollectDrink),
        |w| w.toward(is_block(BlockKind::Water), ActionKind::Do),
    );
    w.until(
        "table",
        |w| w.has(Achievement::PlaceTable),
        |w| w.toward(placeable, ActionKind::PlaceTable),
    );
    let table = w.station(BlockKind::CraftingTable).expect("table placed");
    for (a, item) in [
        (ActionKind::MakeWoodPickaxe, Item::WoodPickaxe),
        (ActionKind::MakeWoodSword, Item::WoodSword),
    ] {
        w.until(
            "wood tool",
            |w| w.item(item) > 0,
            |w| Some(w.toward_area(table, 1).unwrap_or(a)),
        );
    }
    w.until(
        "stone",
        |w| w.item(Item::Stone) >= 5,
        |w| w.toward(is_block(BlockKind::Stone), ActionKind::Do),
    );
    w.until(
        "place stone",
        |w| w.has(Achievement::PlaceStone),
        |w| w.toward(placeable, ActionKind::PlaceStone),
    );
    for (a, item) in [
        (ActionKind::MakeStonePickaxe, Item::StonePickaxe),
        (ActionKind::MakeStoneSword, Item::StoneSword),
    ] {
        w.until(
            "stone tool",
            |w| w.item(item) > 0,
            |w| Some(w.toward_area(table, 1).unwrap_or(a)),
        );
    }
    w.until(
        "coal",
        |w| w.item(Item::Coal) >= 2,
        |w| w.toward(is_block(BlockKind::CoalOre), ActionKind::Do),
    );
    w.until(
        "iron",
        |w| w.item(Item::Iron) >= 2,
        |w| w.toward(is_block(BlockKind::IronOre), ActionKind::Do),
    );
    w.until(
        "stone for furnace",
        |w| w.item(Item::Stone) >= 1,
        |w| w.toward(is_block(BlockKind::Stone), ActionKind::Do),
    );
    w.until(
        "furnace",
        |w| w.has(Achievement::PlaceFurnace),
        |w| {
            Some(w.toward_area(table, 1).unwrap_or_else(|| {
                w.toward(placeable, ActionKind::PlaceFurnace)
                    .unwrap_or(ActionKind::Noop)
            }))
        },
    );
    for (a, item) in [
        (ActionKind::MakeIronPickaxe, Item::IronPickaxe),
        (ActionKind::MakeIronSword, Item::IronSword),
    ] {
        w.until(
            "iron tool",
            |w| w.item(item) > 0,
            |w| Some(w.toward_area(table, 1).unwrap_or(a)),
        );
    }
    w.until(
        "diamond",
        |w| w.item(Item::Diamond) >= 1,
        |w| w.toward(is_block(BlockKind::DiamondOre), ActionKind::Do),
    );
    w.until(
        "zombie",
        |w| w.has(Achievement::DefeatZombie),
        |w| w.toward(is_mob(MobKind::Zombie), ActionKind::Do),
    );
    w.until(
        "cow",
        |w| w.has(Achievement::EatCow),
        |w| w.toward(is_mob(MobKind::Cow), ActionKind::Do),
    );
    w.until(
        "skeleton",
        |w| w.has(Achievement::DefeatSkeleton),
        |w| w.toward(is_mob(MobKind::Skeleton), ActionKind::Do),
    );
    w.until(
        "wake up",
        |w| w.has(Achievement::WakeUp),
        |w| {
            let p = &w.state.players[0];
            Some(if !p.sleeping && p.energy < 9 {
                ActionKind::Sleep
            } else {
                ActionKind::Noop
            })
        },
    );
    w.until(
        "eat plant",
        |w| w.has(Achievement::EatPlant),
        |w| {
            w.toward(is_block(BlockKind::PlantRipe), ActionKind::Do)
                .or(Some(ActionKind::Noop))
        },
    );
    w
}
