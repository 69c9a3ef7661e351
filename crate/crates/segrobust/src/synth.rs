//! Procedural test data: a fixed "natural" calibration image and a small
//! surgical-like corpus (bright elongated tool on textured tissue).

use std::path::Path;

use segrobust_core::corrupt::rng::{mix64, Stream};
use segrobust_core::raster::{BinaryMask, Image};

use crate::error::Result;
use crate::io;

/// Smooth value noise in `[0, 1]`: bilinear interpolation of hashed lattice
/// values with a smoothstep fade.
fn value_noise(seed: u64, x: f64, y: f64, scale: f64) -> f64 {
    let (fx, fy) = (x / scale, y / scale);
    let (x0, y0) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - x0, fy - y0);
    let fade = |t: f64| t * t * (3.0 - 2.0 * t);
    let corner = |i: f64, j: f64| {
        let h = mix64(seed ^ mix64((i as i64 as u64) ^ mix64(j as i64 as u64)));
        (h >> 11) as f64 / (1u64 << 53) as f64
    };
    let (u, v) = (fade(tx), fade(ty));
    let top = corner(x0, y0) * (1.0 - u) + corner(x0 + 1.0, y0) * u;
    let bottom = corner(x0, y0 + 1.0) * (1.0 - u) + corner(x0 + 1.0, y0 + 1.0) * u;
    top * (1.0 - v) + bottom * v
}

/// Sum of octaves of [`value_noise`], normalized to `[0, 1]`.
fn fractal_noise(seed: u64, x: f64, y: f64, scale: f64, octaves: u32) -> f64 {
    let (mut total, mut weight, mut amp, mut s) = (0.0, 0.0, 1.0, scale);
    for o in 0..octaves {
        total += amp * value_noise(seed.wrapping_add(u64::from(o)), x, y, s);
        weight += amp;
        amp *= 0.5;
        s *= 0.5;
    }
    total / weight
}

fn to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Fixed 256×256 calibration image with flat regions, sharp edges, gradients
/// and fine texture. Edges sit at fractional, non-periodic positions so that
/// block-based kernels see no accidental alignment with the pixel grid.
pub fn natural_test_image() -> Image {
    const SEED: u64 = 0x5EED_0001;
    Image::from_fn(256, 256, |x, y| {
        let (fx, fy) = (f64::from(x) + 0.5, f64::from(y) + 0.5);
        let grain = fractal_noise(SEED, fx, fy, 3.7, 2) - 0.5;
        let horizon = 100.4 + 0.07 * fx;
        let mut rgb = if fy < horizon {
            // Sky gradient with soft clouds.
            let cloud = fractal_noise(SEED + 10, fx, fy, 48.0, 4);
            let t = fy / horizon;
            let c = (cloud - 0.45).max(0.0) * 1.2;
            [0.35 + 0.2 * t + c, 0.55 + 0.15 * t + c, 0.85 + c * 0.5]
        } else {
            // Textured ground.
            let n = fractal_noise(SEED + 20, fx, fy, 23.3, 5);
            [0.30 + 0.35 * n, 0.45 + 0.3 * n, 0.15 + 0.15 * n]
        };
        // Sun.
        if (fx - 200.3).powi(2) + (fy - 40.6).powi(2) < 18.4f64.powi(2) {
            rgb = [0.98, 0.92, 0.55];
        }
        // Slightly tilted house with a window.
        let (hx, hy) = (fx + 0.06 * (fy - 160.0), fy - 0.04 * (fx - 75.0));
        if (41.3..109.7).contains(&hx) && (119.4..201.1).contains(&hy) {
            rgb = [0.75, 0.30, 0.22];
            if (61.7..86.2).contains(&hx) && (139.6..165.3).contains(&hy) {
                rgb = [0.12, 0.12, 0.18];
            }
        }
        // Pole with slanted stripes.
        if (170.4..182.9).contains(&fx) && fy > 80.7 {
            let band = ((fy + 0.3 * fx) / 7.3).floor() as i64;
            rgb = if band % 2 == 0 { [0.9, 0.9, 0.9] } else { [0.08, 0.08, 0.08] };
        }
        [to_u8(rgb[0] + 0.08 * grain), to_u8(rgb[1] + 0.08 * grain), to_u8(rgb[2] + 0.08 * grain)]
    })
    .expect("non-empty image")
}

/// Geometry of one synthetic tool: a capsule (segment with round caps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tool {
    pub cx: f64,
    pub cy: f64,
    pub angle: f64,
    pub half_length: f64,
    pub radius: f64,
}

impl Tool {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let along = (dx * c + dy * s).clamp(-self.half_length, self.half_length);
        let (px, py) = (dx - along * c, dy - along * s);
        px * px + py * py <= self.radius * self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    pub frames: u32,
    pub size: u32,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { frames: 20, size: 128, seed: 0 }
    }
}

/// Tool placement for frame `index`: centred near one of the inner 32-px
/// grid-cell centres, random orientation.
pub fn tool_for_frame(opts: &SynthOptions, index: u32) -> Tool {
    let mut rng = Stream::new(opts.seed, 0, 0, index).at(0);
    let cells = (opts.size / 32).max(1);
    let inner = |r: f64| {
        let lo = u32::from(cells > 2);
        let hi = cells - lo;
        let cell = lo + ((r * f64::from(hi - lo)) as u32).min(hi - lo - 1);
        f64::from(cell) * 32.0 + 16.0
    };
    let cx = inner(rng.next_f64()) + (rng.next_f64() - 0.5) * 6.0;
    let cy = inner(rng.next_f64()) + (rng.next_f64() - 0.5) * 6.0;
    Tool {
        cx,
        cy,
        angle: rng.next_f64() * std::f64::consts::PI,
        half_length: 18.0 + 4.0 * rng.next_f64(),
        radius: 4.0 + 2.0 * rng.next_f64(),
    }
}

/// Renders frame `index` and its ground truth.
pub fn tool_frame(opts: &SynthOptions, index: u32) -> (Image, BinaryMask) {
    let tool = tool_for_frame(opts, index);
    let seed = mix64(opts.seed ^ u64::from(index));
    let (c, s) = (tool.angle.cos(), tool.angle.sin());
    let img = Image::from_fn(opts.size, opts.size, |x, y| {
        let (fx, fy) = (f64::from(x) + 0.5, f64::from(y) + 0.5);
        if tool.contains(fx, fy) {
            // Metallic shading across the shaft.
            let across = ((fx - tool.cx) * -s + (fy - tool.cy) * c) / tool.radius;
            let shade = 0.80 + 0.12 * (1.0 - across * across);
            [to_u8(shade), to_u8(shade), to_u8(shade + 0.03)]
        } else {
            let vessels = fractal_noise(seed, fx, fy, 20.0, 3);
            let grain = fractal_noise(seed.wrapping_add(7), fx, fy, 3.0, 2);
            let light = 0.85 + 0.15 * value_noise(seed.wrapping_add(13), fx, fy, 64.0);
            [
                to_u8(light * (0.55 + 0.15 * vessels + 0.05 * grain)),
                to_u8(light * (0.18 + 0.10 * vessels + 0.05 * grain)),
                to_u8(light * (0.16 + 0.08 * vessels + 0.05 * grain)),
            ]
        }
    })
    .expect("non-empty frame");
    let gt = BinaryMask::from_fn(opts.size, opts.size, |x, y| tool.contains(f64::from(x) + 0.5, f64::from(y) + 0.5))
        .expect("non-empty frame");
    (img, gt)
}

pub fn frame_stem(index: u32) -> String {
    format!("frame_{index:03}")
}

/// Writes `root/images/frame_NNN.png` and `root/gt/frame_NNN.png`.
pub fn write_tool_corpus(root: &Path, opts: &SynthOptions) -> Result<()> {
    for i in 0..opts.frames {
        let (img, gt) = tool_frame(opts, i);
        let stem = frame_stem(i);
        io::write_png(&root.join("images").join(format!("{stem}.png")), &img)?;
        io::write_mask_png(&root.join("gt").join(format!("{stem}.png")), &gt)?;
    }
    Ok(())
}
