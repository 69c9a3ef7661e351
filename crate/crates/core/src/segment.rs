//! Segmenter contract and the built-in baseline over-segmenter.
//!
//! The baseline is a SLIC-style k-means in (R, G, B, λx, λy) space: centres
//! start on a regular grid of step `cell`, each centre only claims pixels
//! within one grid step of itself, and the loop runs a fixed number of
//! iterations. Colours are normalized to `[0, 1]` and pixel coordinates are
//! taken at pixel centres (`x + 0.5`). Every pixel always carries a label, so
//! the non-empty clusters partition the frame.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::corrupt::rng::mix64;
use crate::maskalg::{MaskAlgError, SubMask, SubMaskSet};
use crate::raster::{BinaryMask, Image};

pub const DEFAULT_CELL: u32 = 32;
pub const DEFAULT_ITERATIONS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentError {
    #[error("image {width}x{height} is smaller than one {cell}x{cell} cell")]
    ImageTooSmall { width: u32, height: u32, cell: u32 },
    #[error("cell size must be positive")]
    ZeroCell,
    #[error(transparent)]
    MaskSet(#[from] MaskAlgError),
}

/// Anything that turns a frame into a set of sub-masks.
pub trait Segmenter {
    fn name(&self) -> &str;
    fn version(&self) -> &str;
    fn segment(&self, frame_id: &str, img: &Image) -> Result<SubMaskSet, SegmentError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSegmenter {
    pub cell: u32,
    pub iterations: u32,
    pub seed: u64,
    /// Weight λ on pixel coordinates; `None` means `0.5 / cell`.
    pub spatial_weight: Option<f64>,
}

impl Default for BaselineSegmenter {
    fn default() -> Self {
        Self { cell: DEFAULT_CELL, iterations: DEFAULT_ITERATIONS, seed: 0, spatial_weight: None }
    }
}

impl Segmenter for BaselineSegmenter {
    fn name(&self) -> &str {
        "segrobust-baseline-slic"
    }

    fn version(&self) -> &str {
        env!("CARGO_PKG_VERSION")
    }

    fn segment(&self, frame_id: &str, img: &Image) -> Result<SubMaskSet, SegmentError> {
        let lambda = self.spatial_weight.unwrap_or(0.5 / f64::from(self.cell.max(1)));
        let labels = slic_labels(img, self.cell, self.iterations, self.seed, lambda)?;
        labels_to_set(frame_id.into(), img.width(), img.height(), &labels)
    }
}

/// Baseline over-segmentation with the default spatial weight.
pub fn baseline_oversegment(img: &Image, cell: u32, iterations: u32, seed: u64) -> Result<SubMaskSet, SegmentError> {
    BaselineSegmenter { cell, iterations, seed, spatial_weight: None }.segment("", img)
}

#[derive(Clone, Copy, Debug)]
struct Center {
    color: [f64; 3],
    x: f64,
    y: f64,
}

/// Per-pixel cluster labels after `iterations` rounds.
fn slic_labels(img: &Image, cell: u32, iterations: u32, seed: u64, lambda: f64) -> Result<Vec<u32>, SegmentError> {
    if cell == 0 {
        return Err(SegmentError::ZeroCell);
    }
    let (w, h) = img.dims();
    if w < cell || h < cell {
        return Err(SegmentError::ImageTooSmall { width: w, height: h, cell });
    }
    let (wu, hu) = (w as usize, h as usize);
    let nx = (w / cell) as usize;
    let ny = (h / cell) as usize;
    let step_x = f64::from(w) / nx as f64;
    let step_y = f64::from(h) / ny as f64;

    let color: Vec<[f64; 3]> = img
        .as_bytes()
        .chunks_exact(3)
        .map(|p| [f64::from(p[0]) / 255.0, f64::from(p[1]) / 255.0, f64::from(p[2]) / 255.0])
        .collect();

    let mut centers = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let x = (i as f64 + 0.5) * step_x;
            let y = (j as f64 + 0.5) * step_y;
            let px = (x as usize).min(wu - 1);
            let py = (y as usize).min(hu - 1);
            centers.push(Center { color: color[py * wu + px], x, y });
        }
    }
    // Seeded priority among centres, used only for exactly equal distances.
    let priority: Vec<u64> = (0..centers.len() as u64).map(|k| mix64(seed ^ mix64(k))).collect();

    let mut labels: Vec<u32> = (0..wu * hu)
        .map(|p| {
            let (x, y) = (p % wu, p / wu);
            let i = ((x as f64 / step_x) as usize).min(nx - 1);
            let j = ((y as f64 / step_y) as usize).min(ny - 1);
            (j * nx + i) as u32
        })
        .collect();
    let mut best = vec![f64::INFINITY; wu * hu];
    let l2 = lambda * lambda;

    for _ in 0..iterations {
        best.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (k, c) in centers.iter().enumerate() {
            let x0 = libm::floor(c.x - step_x).max(0.0) as usize;
            let x1 = (libm::ceil(c.x + step_x) as usize).min(wu - 1);
            let y0 = libm::floor(c.y - step_y).max(0.0) as usize;
            let y1 = (libm::ceil(c.y + step_y) as usize).min(hu - 1);
            for y in y0..=y1 {
                let dy = y as f64 + 0.5 - c.y;
                for x in x0..=x1 {
                    let p = y * wu + x;
                    let dx = x as f64 + 0.5 - c.x;
                    let col = color[p];
                    let dr = col[0] - c.color[0];
                    let dg = col[1] - c.color[1];
                    let db = col[2] - c.color[2];
                    let d = dr * dr + dg * dg + db * db + l2 * (dx * dx + dy * dy);
                    let cur = best[p];
                    if d < cur || (d == cur && priority[k] < priority[labels[p] as usize]) {
                        best[p] = d;
                        labels[p] = k as u32;
                    }
                }
            }
        }
        let mut sums = vec![[0.0f64; 5]; centers.len()];
        let mut counts = vec![0u64; centers.len()];
        for (p, &l) in labels.iter().enumerate() {
            let s = &mut sums[l as usize];
            let col = color[p];
            s[0] += col[0];
            s[1] += col[1];
            s[2] += col[2];
            s[3] += (p % wu) as f64 + 0.5;
            s[4] += (p / wu) as f64 + 0.5;
            counts[l as usize] += 1;
        }
        for ((c, s), &n) in centers.iter_mut().zip(&sums).zip(&counts) {
            if n == 0 {
                continue;
            }
            let n = n as f64;
            *c = Center { color: [s[0] / n, s[1] / n, s[2] / n], x: s[3] / n, y: s[4] / n };
        }
    }
    Ok(labels)
}

fn labels_to_set(frame_id: String, w: u32, h: u32, labels: &[u32]) -> Result<SubMaskSet, SegmentError> {
    let k = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut masks: Vec<Option<BinaryMask>> = vec![None; k];
    let wu = w as usize;
    for (p, &l) in labels.iter().enumerate() {
        let m = masks[l as usize].get_or_insert_with(|| BinaryMask::empty(w, h).expect("non-empty frame"));
        m.set((p % wu) as u32, (p / wu) as u32, true);
    }
    let subs = masks
        .into_iter()
        .enumerate()
        .filter_map(|(id, m)| m.map(|mask| SubMask { id: id as u32, mask }))
        .collect();
    Ok(SubMaskSet::new(frame_id, w, h, subs)?)
}
