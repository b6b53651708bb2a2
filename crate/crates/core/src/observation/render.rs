//! Flat-colour tile renderer for replays. Not an observation channel.

use crate::types::{BlockKind, Direction, MobKind, Pos};
use crate::world::WorldState;
use image::codecs::gif::{GifEncoder, Repeat};
use image::{Delay, Frame, Rgb, RgbImage, RgbaImage};
use std::io::Write;

/// Side of one cell in pixels.
pub const SPRITE_SIZE: u32 = 8;

fn block_color(b: BlockKind) -> [u8; 3] {
    match b {
        BlockKind::Grass => [90, 160, 70],
        BlockKind::Sand => [220, 205, 140],
        BlockKind::Water => [60, 110, 200],
        BlockKind::Tree => [30, 95, 40],
        BlockKind::Stone => [120, 120, 120],
        BlockKind::Path => [175, 160, 135],
        BlockKind::CoalOre => [50, 50, 50],
        BlockKind::IronOre => [185, 140, 110],
        BlockKind::DiamondOre => [140, 230, 235],
        BlockKind::Lava => [230, 90, 20],
        BlockKind::CraftingTable => [140, 90, 40],
        BlockKind::Furnace => [95, 80, 80],
        BlockKind::PlantSapling => [120, 200, 90],
        BlockKind::PlantRipe => [200, 60, 90],
        BlockKind::PlacedStone => [150, 150, 160],
        BlockKind::Darkness => [0, 0, 0],
    }
}

fn mob_color(k: MobKind) -> [u8; 3] {
    match k {
        MobKind::Zombie => [40, 120, 60],
        MobKind::Skeleton => [235, 235, 235],
        MobKind::Cow => [120, 70, 40],
        MobKind::Arrow => [250, 250, 120],
    }
}

/// Distinct colours for the first players; later ids cycle.
const PLAYER_COLORS: [[u8; 3]; 8] = [
    [230, 40, 40],
    [40, 80, 230],
    [240, 200, 30],
    [200, 40, 200],
    [30, 200, 200],
    [255, 140, 0],
    [255, 255, 255],
    [100, 40, 160],
];

fn fill(img: &mut RgbImage, cell: (u32, u32), inset: u32, color: [u8; 3]) {
    let (r, c) = cell;
    for y in inset..SPRITE_SIZE - inset {
        for x in inset..SPRITE_SIZE - inset {
            img.put_pixel(c * SPRITE_SIZE + x, r * SPRITE_SIZE + y, Rgb(color));
        }
    }
}

/// Draws rows `r0..r0+rows`, cols `c0..c0+cols` of the map; living players
/// are drawn with a facing mark, dead players are not drawn.
fn draw(state: &WorldState, r0: i32, c0: i32, rows: u32, cols: u32) -> RgbImage {
    let mut img = RgbImage::new(cols * SPRITE_SIZE, rows * SPRITE_SIZE);
    let local = |p: Pos| -> Option<(u32, u32)> {
        let r = p.row - r0;
        let c = p.col - c0;
        (r >= 0 && c >= 0 && (r as u32) < rows && (c as u32) < cols).then_some((r as u32, c as u32))
    };
    for r in 0..rows {
        for c in 0..cols {
            let b = state.tile(Pos::new(r0 + r as i32, c0 + c as i32));
            fill(&mut img, (r, c), 0, block_color(b));
        }
    }
    for m in &state.mobs {
        if let Some(cell) = local(m.pos) {
            let inset = if m.kind == MobKind::Arrow { 3 } else { 1 };
            fill(&mut img, cell, inset, mob_color(m.kind));
        }
    }
    for (i, p) in state.players.iter().enumerate() {
        if !p.alive {
            continue;
        }
        let Some((r, c)) = local(p.pos) else { continue };
        fill(&mut img, (r, c), 1, PLAYER_COLORS[i % PLAYER_COLORS.len()]);
        let (y, x) = match p.dir {
            Direction::Up => (1, SPRITE_SIZE / 2),
            Direction::Down => (SPRITE_SIZE - 2, SPRITE_SIZE / 2),
            Direction::Left => (SPRITE_SIZE / 2, 1),
            Direction::Right => (SPRITE_SIZE / 2, SPRITE_SIZE - 2),
        };
        img.put_pixel(c * SPRITE_SIZE + x, r * SPRITE_SIZE + y, Rgb([0, 0, 0]));
    }
    img
}

/// The whole map, `width × height` cells of [`SPRITE_SIZE`] pixels.
pub fn render_frame(state: &WorldState) -> RgbImage {
    draw(state, 0, 0, state.height as u32, state.width as u32)
}

/// One agent's `rows × cols` window centred on it.
pub fn render_window(state: &WorldState, agent: usize, rows: u16, cols: u16) -> RgbImage {
    let p = state.players[agent].pos;
    draw(
        state,
        p.row - rows as i32 / 2,
        p.col - cols as i32 / 2,
        rows as u32,
        cols as u32,
    )
}

/// Writes frames as a looping GIF with `delay_ms` per frame.
pub fn write_gif<W: Write>(
    out: W,
    frames: impl IntoIterator<Item = RgbImage>,
    delay_ms: u32,
) -> image::ImageResult<()> {
    let mut enc = GifEncoder::new_with_speed(out, 10);
    enc.set_repeat(Repeat::Infinite)?;
    for f in frames {
        let rgba: RgbaImage = image::DynamicImage::ImageRgb8(f).to_rgba8();
        enc.encode_frame(Frame::from_parts(rgba, 0, 0, Delay::from_numer_denom_ms(delay_ms, 1)))?;
    }
    Ok(())
}
