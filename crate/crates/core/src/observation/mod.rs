//! Symbolic per-agent observations and the replay renderer.
//!
//! Vector layout (all `f32`, values in `[0, 1]`):
//!
//! | block        | length                 | content                                      |
//! |--------------|------------------------|----------------------------------------------|
//! | `map`        | rows × cols × 21       | row-major cells, 21 one-hot channels per cell |
//! | `inventory`  | 12                     | count / 10, [`Item`] order                   |
//! | `intrinsics` | 4                      | health, food, drink, energy, each / 10       |
//! | `direction`  | 4                      | one-hot up, down, left, right                |
//! | `light`      | 1                      | light level                                  |
//! | `sleeping`   | 1                      |                                              |
//! | `alive`      | 1                      |                                              |
//! | `other_k`    | rows × cols + 20       | one slot per other agent, ascending id       |
//!
//! Map channels 0..16 are the block kinds in [`BlockKind`] order (cells
//! outside the map are darkness), then zombie, skeleton, cow, arrow and
//! other player. Each other-agent slot holds a one-hot position map,
//! inventory, intrinsics and direction, and is all zeros whenever that
//! agent is not visible to the observer. Slots are present only when
//! `observe_others` is set.

mod render;

pub use render::{render_frame, render_window, write_gif, SPRITE_SIZE};

use crate::config::GameConfig;
use crate::types::{BlockKind, Item, MobKind, PlayerState, Pos};
use crate::world::WorldState;
use serde::{Deserialize, Serialize};

pub const MANIFEST_VERSION: &str = "1.0";
pub const MAP_CHANNELS: usize = BlockKind::COUNT + 5;
const PLAYER_CHANNEL: usize = BlockKind::COUNT + 4;
const INTRINSICS: usize = 4;
const DIRECTIONS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsBlock {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    /// Row-major shape; `[len]` for flat blocks.
    pub shape: Vec<usize>,
}

/// Ordered description of the observation vector for one config.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsManifest {
    pub version: String,
    pub view_rows: usize,
    pub view_cols: usize,
    pub map_channels: Vec<String>,
    pub blocks: Vec<ObsBlock>,
    pub total_len: usize,
}

impl ObsManifest {
    pub fn block(&self, name: &str) -> Option<&ObsBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn obs_manifest(cfg: &GameConfig) -> ObsManifest {
    let rows = cfg.view_rows as usize;
    let cols = cfg.view_cols as usize;
    let mut blocks = Vec::new();
    let mut offset = 0;
    let mut push = |name: String, shape: Vec<usize>| {
        let len = shape.iter().product();
        blocks.push(ObsBlock {
            name,
            offset,
            len,
            shape,
        });
        offset += len;
    };
    push("map".into(), vec![rows, cols, MAP_CHANNELS]);
    push("inventory".into(), vec![Item::COUNT]);
    push("intrinsics".into(), vec![INTRINSICS]);
    push("direction".into(), vec![DIRECTIONS]);
    push("light".into(), vec![1]);
    push("sleeping".into(), vec![1]);
    push("alive".into(), vec![1]);
    if cfg.observe_others {
        for k in 0..cfg.n_agents.saturating_sub(1) {
            push(format!("other_{k}/position"), vec![rows, cols]);
            push(format!("other_{k}/inventory"), vec![Item::COUNT]);
            push(format!("other_{k}/intrinsics"), vec![INTRINSICS]);
            push(format!("other_{k}/direction"), vec![DIRECTIONS]);
        }
    }
    let mut map_channels: Vec<String> = BlockKind::ALL.iter().map(|b| b.name().to_string()).collect();
    map_channels.extend(["zombie", "skeleton", "cow", "arrow", "player"].map(String::from));
    ObsManifest {
        version: MANIFEST_VERSION.to_string(),
        view_rows: rows,
        view_cols: cols,
        map_channels,
        blocks,
        total_len: offset,
    }
}

/// Length of the observation vector; equals `obs_manifest(cfg).total_len`.
pub fn obs_len(cfg: &GameConfig) -> usize {
    let cells = cfg.view_rows as usize * cfg.view_cols as usize;
    let own = cells * MAP_CHANNELS + Item::COUNT + INTRINSICS + DIRECTIONS + 3;
    let others = if cfg.observe_others {
        cfg.n_agents.saturating_sub(1) * (cells + Item::COUNT + INTRINSICS + DIRECTIONS)
    } else {
        0
    };
    own + others
}

/// Offset of `target` from the centre of `observer`'s window, if inside it.
#[inline]
fn window_offset(cfg: &GameConfig, observer: Pos, target: Pos) -> Option<(usize, usize)> {
    let half_r = cfg.view_rows as i32 / 2;
    let half_c = cfg.view_cols as i32 / 2;
    let dr = target.row - observer.row;
    let dc = target.col - observer.col;
    if dr.abs() <= half_r && dc.abs() <= half_c {
        Some(((dr + half_r) as usize, (dc + half_c) as usize))
    } else {
        None
    }
}

/// Whether `target` appears in `observer`'s observation at the current step:
/// alive, a different agent, inside the window, and permitted by its
/// visibility rule.
#[inline]
pub fn is_visible(cfg: &GameConfig, state: &WorldState, observer: usize, target: usize) -> bool {
    let t = &state.players[target];
    target != observer
        && t.alive
        && window_offset(cfg, state.players[observer].pos, t.pos).is_some()
        && cfg.visibility_of(target).permits(state.step_counter)
}

pub fn visible_players<'a>(
    cfg: &'a GameConfig,
    state: &'a WorldState,
    observer: usize,
) -> impl Iterator<Item = usize> + 'a {
    (0..state.players.len()).filter(move |&t| is_visible(cfg, state, observer, t))
}

/// Encodes `observer`'s view into `out`, which must be `obs_len(cfg)` long.
pub fn encode_symbolic(cfg: &GameConfig, state: &WorldState, observer: usize, out: &mut [f32]) {
    assert_eq!(out.len(), obs_len(cfg), "observation buffer length");
    out.fill(0.0);
    let rows = cfg.view_rows as usize;
    let cols = cfg.view_cols as usize;
    let me = &state.players[observer];
    let centre = me.pos;
    let half_r = rows as i32 / 2;
    let half_c = cols as i32 / 2;

    for wr in 0..rows {
        let row = centre.row + wr as i32 - half_r;
        for wc in 0..cols {
            let col = centre.col + wc as i32 - half_c;
            let block = state.tile(Pos::new(row, col));
            out[(wr * cols + wc) * MAP_CHANNELS + block.index()] = 1.0;
        }
    }
    for m in &state.mobs {
        if let Some((wr, wc)) = window_offset(cfg, centre, m.pos) {
            let ch = BlockKind::COUNT + mob_channel(m.kind);
            out[(wr * cols + wc) * MAP_CHANNELS + ch] = 1.0;
        }
    }

    let mut o = rows * cols * MAP_CHANNELS;
    o = write_player_stats(me, out, o);
    out[o] = state.light_level;
    out[o + 1] = me.sleeping as u8 as f32;
    out[o + 2] = me.alive as u8 as f32;
    o += 3;

    let slot_len = rows * cols + Item::COUNT + INTRINSICS + DIRECTIONS;
    let mut slot = 0;
    for t in 0..state.players.len() {
        if t == observer {
            continue;
        }
        let visible = is_visible(cfg, state, observer, t);
        if visible {
            let other = &state.players[t];
            let (wr, wc) = window_offset(cfg, centre, other.pos).expect("visible implies in window");
            out[(wr * cols + wc) * MAP_CHANNELS + PLAYER_CHANNEL] = 1.0;
            if cfg.observe_others {
                let base = o + slot * slot_len;
                out[base + wr * cols + wc] = 1.0;
                write_player_stats(other, out, base + rows * cols);
            }
        }
        slot += 1;
    }
}

pub fn encode_symbolic_vec(cfg: &GameConfig, state: &WorldState, observer: usize) -> Vec<f32> {
    let mut out = vec![0.0; obs_len(cfg)];
    encode_symbolic(cfg, state, observer, &mut out);
    out
}

/// Inventory, intrinsics and direction; returns the offset after them.
fn write_player_stats(p: &PlayerState, out: &mut [f32], mut o: usize) -> usize {
    for (i, &n) in p.inventory.0.iter().enumerate() {
        out[o + i] = n as f32 / 10.0;
    }
    o += Item::COUNT;
    out[o] = p.health_halves as f32 / 20.0;
    out[o + 1] = p.food as f32 / 10.0;
    out[o + 2] = p.drink as f32 / 10.0;
    out[o + 3] = p.energy as f32 / 10.0;
    o += INTRINSICS;
    out[o + p.dir as usize] = 1.0;
    o + DIRECTIONS
}

fn mob_channel(kind: MobKind) -> usize {
    match kind {
        MobKind::Zombie => 0,
        MobKind::Skeleton => 1,
        MobKind::Cow => 2,
        MobKind::Arrow => 3,
    }
}
