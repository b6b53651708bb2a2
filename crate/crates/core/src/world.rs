//! Full simulation state and the text map format used for fixtures.

use crate::rng::Rng;
use crate::types::{AgentId, BlockKind, MobKind, MobState, Plant, PlayerState, Pos};
use serde::{Deserialize, Serialize};

const NO_PLACER: u8 = u8::MAX;

/// Which agent placed each player-placed block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProvenanceGrid {
    cells: Vec<u8>,
}

impl ProvenanceGrid {
    pub fn new(len: usize) -> Self {
        ProvenanceGrid {
            cells: vec![NO_PLACER; len],
        }
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Option<AgentId> {
        match self.cells[idx] {
            NO_PLACER => None,
            a => Some(a),
        }
    }

    #[inline]
    pub fn set(&mut self, idx: usize, agent: AgentId) {
        self.cells[idx] = agent;
    }

    #[inline]
    pub fn clear(&mut self, idx: usize) {
        self.cells[idx] = NO_PLACER;
    }

    pub fn raw(&self) -> &[u8] {
        &self.cells
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub width: u16,
    pub height: u16,
    pub tiles: Vec<BlockKind>,
    pub provenance: ProvenanceGrid,
    pub players: Vec<PlayerState>,
    pub mobs: Vec<MobState>,
    pub plants: Vec<Plant>,
    pub step_counter: u32,
    /// Derived from `step_counter` and the day length; kept for observers.
    pub light_level: f32,
    pub rng: Rng,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TextMapError {
    #[error("text map is empty")]
    Empty,
    #[error("row {row} has {len} cells, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("unknown glyph {glyph:?} at row {row}, col {col}")]
    UnknownGlyph { glyph: char, row: usize, col: usize },
    #[error("player slots must be 0..n without gaps, found {0:?}")]
    PlayerSlots(Vec<u8>),
}

impl WorldState {
    /// A map filled with `fill` and no entities.
    pub fn blank(width: u16, height: u16, fill: BlockKind, seed: u64) -> Self {
        let len = width as usize * height as usize;
        WorldState {
            width,
            height,
            tiles: vec![fill; len],
            provenance: ProvenanceGrid::new(len),
            players: Vec::new(),
            mobs: Vec::new(),
            plants: Vec::new(),
            step_counter: 0,
            light_level: 1.0,
            rng: Rng::new(seed),
        }
    }

    #[inline]
    pub fn in_bounds(&self, p: Pos) -> bool {
        p.row >= 0 && p.col >= 0 && p.row < self.height as i32 && p.col < self.width as i32
    }

    #[inline]
    pub fn idx(&self, p: Pos) -> usize {
        debug_assert!(self.in_bounds(p));
        p.row as usize * self.width as usize + p.col as usize
    }

    #[inline]
    pub fn pos_of(&self, idx: usize) -> Pos {
        Pos::new((idx / self.width as usize) as i32, (idx % self.width as usize) as i32)
    }

    /// Block at `p`; cells outside the map read as darkness.
    #[inline]
    pub fn tile(&self, p: Pos) -> BlockKind {
        if self.in_bounds(p) {
            self.tiles[self.idx(p)]
        } else {
            BlockKind::Darkness
        }
    }

    #[inline]
    pub fn set_tile(&mut self, p: Pos, block: BlockKind) {
        let i = self.idx(p);
        self.tiles[i] = block;
    }

    pub fn placer(&self, p: Pos) -> Option<AgentId> {
        if self.in_bounds(p) {
            self.provenance.get(self.idx(p))
        } else {
            None
        }
    }

    /// Living player standing on `p`, lowest id first.
    #[inline]
    pub fn living_player_at(&self, p: Pos) -> Option<usize> {
        self.players.iter().position(|pl| pl.alive && pl.pos == p)
    }

    #[inline]
    pub fn mob_at(&self, p: Pos) -> Option<usize> {
        self.mobs.iter().position(|m| m.pos == p)
    }

    #[inline]
    pub fn occupied(&self, p: Pos) -> bool {
        self.living_player_at(p).is_some() || self.mob_at(p).is_some()
    }

    pub fn living_agents(&self) -> impl Iterator<Item = usize> + '_ {
        self.players.iter().enumerate().filter(|(_, p)| p.alive).map(|(i, _)| i)
    }

    pub fn any_alive(&self) -> bool {
        self.players.iter().any(|p| p.alive)
    }

    pub fn count_mobs(&self, kind: MobKind) -> usize {
        self.mobs.iter().filter(|m| m.kind == kind).count()
    }

    pub fn count_tiles(&self, block: BlockKind) -> usize {
        self.tiles.iter().filter(|&&b| b == block).count()
    }

    /// One glyph per cell, one line per row (see [`BlockKind::glyph`]).
    pub fn to_text_map(&self) -> String {
        let mut out = String::with_capacity(self.tiles.len() + self.height as usize);
        for row in self.tiles.chunks(self.width as usize) {
            out.extend(row.iter().map(|b| b.glyph()));
            out.push('\n');
        }
        out
    }

    /// Like [`to_text_map`](Self::to_text_map) with living players drawn as
    /// their slot digit and mobs as `Z`, `K`, `C`, `*`.
    pub fn to_text_map_with_entities(&self) -> String {
        let mut grid: Vec<Vec<char>> = self
            .tiles
            .chunks(self.width as usize)
            .map(|r| r.iter().map(|b| b.glyph()).collect())
            .collect();
        for m in &self.mobs {
            grid[m.pos.row as usize][m.pos.col as usize] = mob_glyph(m.kind);
        }
        for (i, p) in self.players.iter().enumerate() {
            if p.alive {
                grid[p.pos.row as usize][p.pos.col as usize] = char::from_digit(i as u32 % 36, 36).unwrap_or('@');
            }
        }
        grid.into_iter()
            .map(|r| r.into_iter().chain(std::iter::once('\n')).collect::<String>())
            .collect()
    }

    /// Parses a text map. Digits place players (on grass), `Z` zombies and
    /// `C` cows (on grass), `K` skeletons (on path). Player slot digits must
    /// be contiguous from 0.
    pub fn from_text_map(text: &str, seed: u64) -> Result<WorldState, TextMapError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
        let Some(first) = lines.first() else {
            return Err(TextMapError::Empty);
        };
        let width = first.chars().count();
        let mut world = WorldState::blank(width as u16, lines.len() as u16, BlockKind::Grass, seed);
        let mut players: Vec<(u8, Pos)> = Vec::new();
        for (row, line) in lines.iter().enumerate() {
            let len = line.chars().count();
            if len != width {
                return Err(TextMapError::Ragged {
                    row,
                    len,
                    expected: width,
                });
            }
            for (col, c) in line.chars().enumerate() {
                let pos = Pos::new(row as i32, col as i32);
                let block = match c {
                    '0'..='9' => {
                        players.push((c as u8 - b'0', pos));
                        BlockKind::Grass
                    }
                    'Z' => {
                        world.mobs.push(MobState::new(MobKind::Zombie, pos));
                        BlockKind::Grass
                    }
                    'C' => {
                        world.mobs.push(MobState::new(MobKind::Cow, pos));
                        BlockKind::Grass
                    }
                    'K' => {
                        world.mobs.push(MobState::new(MobKind::Skeleton, pos));
                        BlockKind::Path
                    }
                    other => BlockKind::from_glyph(other)
                        .filter(|b| *b != BlockKind::Darkness)
                        .ok_or(TextMapError::UnknownGlyph { glyph: other, row, col })?,
                };
                world.set_tile(pos, block);
            }
        }
        players.sort();
        if players.iter().enumerate().any(|(i, (slot, _))| *slot as usize != i) {
            return Err(TextMapError::PlayerSlots(players.iter().map(|p| p.0).collect()));
        }
        world.players = players.into_iter().map(|(_, p)| PlayerState::spawn(p)).collect();
        Ok(world)
    }
}

fn mob_glyph(kind: MobKind) -> char {
    match kind {
        MobKind::Zombie => 'Z',
        MobKind::Skeleton => 'K',
        MobKind::Cow => 'C',
        MobKind::Arrow => '*',
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = "\
~~..T
#0..1
_K.C.
";

    #[test]
    fn parses_entities() {
        let w = WorldState::from_text_map(MAP, 1).unwrap();
        assert_eq!((w.width, w.height), (5, 3));
        assert_eq!(w.players.len(), 2);
        assert_eq!(w.players[1].pos, Pos::new(1, 4));
        assert_eq!(w.tile(Pos::new(0, 4)), BlockKind::Tree);
        assert_eq!(w.tile(Pos::new(2, 1)), BlockKind::Path);
        assert_eq!(w.mobs.len(), 2);
        assert_eq!(w.tile(Pos::new(-1, 0)), BlockKind::Darkness);
    }

    #[test]
    fn text_map_round_trip() {
        let w = WorldState::from_text_map(MAP, 1).unwrap();
        let tiles_only = w.to_text_map();
        let again = WorldState::from_text_map(&tiles_only, 1).unwrap();
        assert_eq!(again.tiles, w.tiles);
        assert_eq!(w.to_text_map_with_entities(), MAP);
    }

    #[test]
    fn rejects_bad_maps() {
        assert_eq!(WorldState::from_text_map("", 0), Err(TextMapError::Empty));
        assert!(matches!(
            WorldState::from_text_map("..\n...\n", 0),
            Err(TextMapError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            WorldState::from_text_map("..X\n", 0),
            Err(TextMapError::UnknownGlyph { glyph: 'X', .. })
        ));
        assert!(matches!(
            WorldState::from_text_map(".1.\n", 0),
            Err(TextMapError::PlayerSlots(_))
        ));
    }
}
