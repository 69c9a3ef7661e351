//! Baseline JPEG lossy path without entropy coding: YCbCr conversion, 4:2:0
//! chroma subsampling, 8×8 DCT, quantization with the Annex K tables scaled
//! by the usual quality rule, then the inverse chain. Entropy coding is
//! lossless, so skipping it leaves the decoded raster unchanged.

use alloc::vec;
use alloc::vec::Vec;

use super::buffer::quantize;
use crate::raster::Image;

const LUMA_QT: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, 12, 12, 14, 19, 26, 58, 60, 55, 14, 13, 16, 24, 40, 57, 69, 56, 14, 17, 22, 29,
    51, 87, 80, 62, 18, 22, 37, 56, 68, 109, 103, 77, 24, 35, 55, 64, 81, 104, 113, 92, 49, 64, 78, 87, 103, 121,
    120, 101, 72, 92, 95, 98, 112, 100, 103, 99,
];

const CHROMA_QT: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Quality-scaled quantization table (libjpeg convention).
pub(super) fn scaled_table(base: &[u16; 64], quality: u32) -> [f64; 64] {
    let q = quality.clamp(1, 100);
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0.0; 64];
    for (o, b) in out.iter_mut().zip(base) {
        *o = ((u32::from(*b) * scale + 50) / 100).clamp(1, 255) as f64;
    }
    out
}

struct Dct {
    basis: [[f64; 8]; 8],
}

impl Dct {
    fn new() -> Self {
        let mut basis = [[0.0; 8]; 8];
        for (u, row) in basis.iter_mut().enumerate() {
            let alpha = if u == 0 { libm::sqrt(1.0 / 8.0) } else { libm::sqrt(2.0 / 8.0) };
            for (x, v) in row.iter_mut().enumerate() {
                *v = alpha * libm::cos((2 * x + 1) as f64 * u as f64 * core::f64::consts::PI / 16.0);
            }
        }
        Self { basis }
    }

    fn forward(&self, block: &[f64; 64]) -> [f64; 64] {
        let mut tmp = [0.0; 64];
        for y in 0..8 {
            for u in 0..8 {
                tmp[y * 8 + u] = (0..8).map(|x| self.basis[u][x] * block[y * 8 + x]).sum();
            }
        }
        let mut out = [0.0; 64];
        for v in 0..8 {
            for u in 0..8 {
                out[v * 8 + u] = (0..8).map(|y| self.basis[v][y] * tmp[y * 8 + u]).sum();
            }
        }
        out
    }

    fn inverse(&self, coef: &[f64; 64]) -> [f64; 64] {
        let mut tmp = [0.0; 64];
        for v in 0..8 {
            for x in 0..8 {
                tmp[v * 8 + x] = (0..8).map(|u| self.basis[u][x] * coef[v * 8 + u]).sum();
            }
        }
        let mut out = [0.0; 64];
        for y in 0..8 {
            for x in 0..8 {
                out[y * 8 + x] = (0..8).map(|v| self.basis[v][y] * tmp[v * 8 + x]).sum();
            }
        }
        out
    }
}

/// Quantizes every 8×8 block of a plane in place (dimensions are multiples of 8).
fn process_plane(plane: &mut [f64], width: usize, height: usize, table: &[f64; 64], dct: &Dct) {
    for by in (0..height).step_by(8) {
        for bx in (0..width).step_by(8) {
            let mut block = [0.0; 64];
            for y in 0..8 {
                for x in 0..8 {
                    block[y * 8 + x] = plane[(by + y) * width + bx + x] - 128.0;
                }
            }
            let mut coef = dct.forward(&block);
            for (c, q) in coef.iter_mut().zip(table) {
                *c = libm::rint(*c / q) * q;
            }
            let rec = dct.inverse(&coef);
            for y in 0..8 {
                for x in 0..8 {
                    plane[(by + y) * width + bx + x] = (rec[y * 8 + x] + 128.0).clamp(0.0, 255.0);
                }
            }
        }
    }
}

pub(super) fn round_trip(img: &Image, quality: f64) -> Image {
    let quality = libm::round(quality) as u32;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pw = w.div_ceil(16) * 16;
    let ph = h.div_ceil(16) * 16;

    let mut luma = vec![0.0; pw * ph];
    let mut cb_full = vec![0.0; pw * ph];
    let mut cr_full = vec![0.0; pw * ph];
    for y in 0..ph {
        for x in 0..pw {
            let [r, g, b] = img.pixel(x.min(w - 1) as u32, y.min(h - 1) as u32).map(f64::from);
            let i = y * pw + x;
            luma[i] = libm::rint(0.299 * r + 0.587 * g + 0.114 * b);
            cb_full[i] = libm::rint(-0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0).clamp(0.0, 255.0);
            cr_full[i] = libm::rint(0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0).clamp(0.0, 255.0);
        }
    }

    let (cw, ch) = (pw / 2, ph / 2);
    let subsample = |full: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; cw * ch];
        for y in 0..ch {
            for x in 0..cw {
                let i = 2 * y * pw + 2 * x;
                out[y * cw + x] = (full[i] + full[i + 1] + full[i + pw] + full[i + pw + 1]) / 4.0;
            }
        }
        out
    };
    let mut cb = subsample(&cb_full);
    let mut cr = subsample(&cr_full);

    let dct = Dct::new();
    process_plane(&mut luma, pw, ph, &scaled_table(&LUMA_QT, quality), &dct);
    let chroma_table = scaled_table(&CHROMA_QT, quality);
    process_plane(&mut cb, cw, ch, &chroma_table, &dct);
    process_plane(&mut cr, cw, ch, &chroma_table, &dct);

    Image::from_fn(w as u32, h as u32, |x, y| {
        let (x, y) = (x as usize, y as usize);
        let yy = luma[y * pw + x];
        let cbv = cb[(y / 2) * cw + x / 2] - 128.0;
        let crv = cr[(y / 2) * cw + x / 2] - 128.0;
        let r = yy + 1.402 * crv;
        let g = yy - 0.344_136 * cbv - 0.714_136 * crv;
        let b = yy + 1.772 * cbv;
        [quantize(r / 255.0), quantize(g / 255.0), quantize(b / 255.0)]
    })
    .expect("same shape")
}
