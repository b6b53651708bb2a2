//! Canonical state serialization and 128-bit digests.
//!
//! Byte layout (all integers little-endian), in this order:
//!
//! 1. `width: u16`, `height: u16`, `step_counter: u32`, rng key `u64`
//! 2. tiles, one byte per cell, row-major
//! 3. provenance, one byte per cell (`0xFF` = none), row-major
//! 4. `player_count: u32`, then per player: `row: i32`, `col: i32`, `dir: u8`,
//!    12 inventory bytes, `health_halves`, `food`, `drink`, `energy`,
//!    flags byte (`alive | sleeping << 1`), achievements `u32`
//! 5. `mob_count: u32`, then per mob: `kind: u8`, `row: i32`, `col: i32`,
//!    `health: u8`, `heading: u8`, `cooldown: u8`
//! 6. `plant_count: u32`, then per plant: `row: i32`, `col: i32`, `age: u32`
//!
//! `light_level` is omitted: it is a pure function of the step counter.

use crate::world::WorldState;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateDigest(pub u128);

impl fmt::Display for StateDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

pub fn canonical_bytes(s: &WorldState, out: &mut Vec<u8>) {
    out.clear();
    out.reserve(16 + s.tiles.len() * 2 + s.players.len() * 32 + s.mobs.len() * 12);
    out.extend_from_slice(&s.width.to_le_bytes());
    out.extend_from_slice(&s.height.to_le_bytes());
    out.extend_from_slice(&s.step_counter.to_le_bytes());
    out.extend_from_slice(&s.rng.key().to_le_bytes());
    out.extend(s.tiles.iter().map(|b| *b as u8));
    out.extend_from_slice(s.provenance.raw());

    out.extend_from_slice(&(s.players.len() as u32).to_le_bytes());
    for p in &s.players {
        out.extend_from_slice(&p.pos.row.to_le_bytes());
        out.extend_from_slice(&p.pos.col.to_le_bytes());
        out.push(p.dir as u8);
        out.extend_from_slice(&p.inventory.0);
        out.extend_from_slice(&[p.health_halves, p.food, p.drink, p.energy]);
        out.push(p.alive as u8 | (p.sleeping as u8) << 1);
        out.extend_from_slice(&p.achievements.0.to_le_bytes());
    }

    out.extend_from_slice(&(s.mobs.len() as u32).to_le_bytes());
    for m in &s.mobs {
        out.push(m.kind as u8);
        out.extend_from_slice(&m.pos.row.to_le_bytes());
        out.extend_from_slice(&m.pos.col.to_le_bytes());
        out.extend_from_slice(&[m.health, m.heading as u8, m.cooldown]);
    }

    out.extend_from_slice(&(s.plants.len() as u32).to_le_bytes());
    for p in &s.plants {
        out.extend_from_slice(&p.pos.row.to_le_bytes());
        out.extend_from_slice(&p.pos.col.to_le_bytes());
        out.extend_from_slice(&p.age.to_le_bytes());
    }
}

pub fn digest_state(s: &WorldState) -> StateDigest {
    let mut buf = Vec::new();
    digest_state_with(s, &mut buf)
}

/// Digest reusing a scratch buffer.
pub fn digest_state_with(s: &WorldState, buf: &mut Vec<u8>) -> StateDigest {
    canonical_bytes(s, buf);
    StateDigest(xxhash_rust::xxh3::xxh3_128(buf))
}

/// Digest of a single player's fields, for frozen-state checks.
pub fn digest_player(s: &WorldState, agent: usize) -> u64 {
    let p = &s.players[agent];
    let mut b = Vec::with_capacity(32);
    b.extend_from_slice(&p.pos.row.to_le_bytes());
    b.extend_from_slice(&p.pos.col.to_le_bytes());
    b.push(p.dir as u8);
    b.extend_from_slice(&p.inventory.0);
    b.extend_from_slice(&[p.health_halves, p.food, p.drink, p.energy]);
    b.push(p.alive as u8 | (p.sleeping as u8) << 1);
    b.extend_from_slice(&p.achievements.0.to_le_bytes());
    xxhash_rust::xxh3::xxh3_64(&b)
}
