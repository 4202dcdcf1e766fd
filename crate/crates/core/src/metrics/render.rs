//! Snapshot rendering: one pixel per particle, colored by type.

use std::collections::HashSet;

use crate::kinetics::World;
use crate::params::KineticParams;

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [255, 255, 255];
/// Passive particles: a light gray just off the background.
pub const PASSIVE_GRAY: Rgb = [224, 224, 224];

pub const DEFAULT_RESOLUTION: u32 = 500;

/// RGB raster with the step it was taken at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotBitmap {
    pub width: u32,
    pub height: u32,
    pub step: u64,
    pub pixels: Vec<Rgb>,
}

impl SnapshotBitmap {
    pub fn blank(width: u32, height: u32, step: u64) -> Self {
        Self {
            width,
            height,
            step,
            pixels: vec![BACKGROUND; (width * height) as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        self.pixels[(y * self.width + x) as usize] = c;
    }

    /// Distinct type colors present (background and passive gray excluded).
    pub fn type_colors(&self) -> HashSet<Rgb> {
        self.pixels.iter().copied().filter(|&c| is_type_color(c)).collect()
    }

    /// Coordinates of pixels holding a type color, row-major.
    pub fn particle_pixels(&self) -> Vec<(u32, u32)> {
        let w = self.width;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &c)| is_type_color(c))
            .map(|(i, _)| (i as u32 % w, i as u32 / w))
            .collect()
    }
}

pub fn is_type_color(c: Rgb) -> bool {
    c != BACKGROUND && c != PASSIVE_GRAY
}

/// Stable 24-bit color of a parameter set, hashed (FNV-1a) from the values
/// quantized to four decimals. Never returns the background or passive colors.
pub fn type_color(params: &KineticParams) -> Rgb {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in params.to_array() {
        let q = (v * 1e4).round() as i64;
        for b in q.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    let h = h ^ (h >> 32);
    let mut c = [(h >> 16) as u8, (h >> 8) as u8, h as u8];
    if !is_type_color(c) {
        c[2] ^= 1;
    }
    c
}

/// Renders `world` at `width`×`height`. Passive particles are drawn first so
/// active ones stay visible; later ids overwrite earlier ones.
pub fn render_at(world: &World, width: u32, height: u32) -> SnapshotBitmap {
    let mut bmp = SnapshotBitmap::blank(width, height, world.time());
    let sx = width as f64 / world.side();
    let sy = height as f64 / world.side();
    let px = |x: f64, s: f64, n: u32| ((x * s) as u32).min(n - 1);
    for p in world.particles().iter().filter(|p| !p.is_active()) {
        bmp.set(px(p.pos.x, sx, width), px(p.pos.y, sy, height), PASSIVE_GRAY);
    }
    for p in world.particles() {
        if let Some(params) = p.params() {
            bmp.set(px(p.pos.x, sx, width), px(p.pos.y, sy, height), type_color(params));
        }
    }
    bmp
}

pub fn render(world: &World) -> SnapshotBitmap {
    render_at(world, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)
}
