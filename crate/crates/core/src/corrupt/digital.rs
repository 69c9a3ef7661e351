use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use super::buffer::{blur_field, FloatImage};
use super::weather::standardize;
use super::Ctx;
use crate::raster::Image;

/// `v' = round_half_even(clamp(v + delta * 255, 0, 255))` per sample.
pub(super) fn brightness(img: &Image, ctx: &Ctx<'_>) -> Image {
    let shift = ctx.param("delta") * 255.0;
    let lut: Vec<u8> = (0..=255u8)
        .map(|v| libm::rint((f64::from(v) + shift).clamp(0.0, 255.0)) as u8)
        .collect();
    let data = img.as_bytes().iter().map(|v| lut[usize::from(*v)]).collect();
    Image::new(img.width(), img.height(), data).expect("same shape")
}

/// Pulls every channel toward its own spatial mean.
pub(super) fn contrast(img: &Image, ctx: &Ctx<'_>) -> Image {
    let factor = ctx.param("factor");
    let mut buf = FloatImage::from_image(img);
    let n = (buf.width * buf.height) as f64;
    let mut means = [0.0; 3];
    for px in buf.data.chunks_exact(3) {
        for c in 0..3 {
            means[c] += px[c];
        }
    }
    means.iter_mut().for_each(|m| *m /= n);
    for px in buf.data.chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] = (px[c] - means[c]) * factor + means[c];
        }
    }
    buf.to_image()
}

/// Pushes each pixel away from its luma by `factor`.
pub(super) fn saturate(img: &Image, ctx: &Ctx<'_>) -> Image {
    let factor = ctx.param("factor");
    let mut buf = FloatImage::from_image(img);
    for px in buf.data.chunks_exact_mut(3) {
        let gray = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        for v in px.iter_mut() {
            *v = gray + (*v - gray) * factor;
        }
    }
    buf.to_image()
}

/// Box-average down to `factor` of the size, then nearest-neighbour back up.
/// Pixel `x` belongs to block `x * down_w / w`, so both passes share blocks.
pub(super) fn pixelate(img: &Image, ctx: &Ctx<'_>) -> Image {
    let factor = ctx.param("factor");
    let (w, h) = (img.width() as usize, img.height() as usize);
    let dw = (libm::floor(w as f64 * factor) as usize).clamp(1, w);
    let dh = (libm::floor(h as f64 * factor) as usize).clamp(1, h);
    let mut sums = vec![[0u64; 3]; dw * dh];
    let mut counts = vec![0u64; dw * dh];
    for y in 0..h {
        for x in 0..w {
            let b = (y * dh / h) * dw + x * dw / w;
            let p = img.pixel(x as u32, y as u32);
            for c in 0..3 {
                sums[b][c] += u64::from(p[c]);
            }
            counts[b] += 1;
        }
    }
    let blocks: Vec<[u8; 3]> = sums
        .iter()
        .zip(&counts)
        .map(|(s, n)| {
            let avg = |v: u64| libm::rint(v as f64 / *n as f64) as u8;
            [avg(s[0]), avg(s[1]), avg(s[2])]
        })
        .collect();
    Image::from_fn(w as u32, h as u32, |x, y| {
        blocks[(y as usize * dh / h) * dw + x as usize * dw / w]
    })
    .expect("same shape")
}

/// Resamples the frame through a smooth random displacement field.
pub(super) fn elastic(img: &Image, ctx: &Ctx<'_>) -> Image {
    let alpha = ctx.param("alpha");
    let smoothing = ctx.param("smoothing");
    let src = FloatImage::from_image(img);
    let (w, h) = (src.width, src.height);
    let field = |id: u32| -> Vec<f64> {
        let stream = ctx.scene_stream(id);
        let raw: Vec<f64> = (0..w * h).map(|i| StandardNormal.sample(&mut stream.at(i as u64))).collect();
        standardize(blur_field(&raw, w, h, smoothing))
    };
    let fx = field(0);
    let fy = field(1);
    let mut out = src.zeros_like();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let p = src.sample(x as f64 + alpha * fx[i], y as f64 + alpha * fy[i]);
            out.put(x, y, p);
        }
    }
    out.to_image()
}
