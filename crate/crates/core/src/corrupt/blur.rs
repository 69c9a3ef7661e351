use alloc::vec;
use alloc::vec::Vec;

use super::buffer::{blur_field, FloatImage};
use super::Ctx;
use crate::raster::Image;

pub(super) fn gaussian(img: &Image, ctx: &Ctx<'_>) -> Image {
    FloatImage::from_image(img).gaussian_blur(ctx.param("sigma")).to_image()
}

/// Disk kernel of `radius`, softened by a small Gaussian to avoid a hard rim.
fn disk_kernel(radius: f64, alias_sigma: f64) -> (Vec<f64>, usize) {
    let pad = libm::ceil(3.0 * alias_sigma) as usize;
    let r = libm::ceil(radius) as usize + pad;
    let size = 2 * r + 1;
    let mut k = vec![0.0; size * size];
    for y in 0..size {
        for x in 0..size {
            let dx = x as f64 - r as f64;
            let dy = y as f64 - r as f64;
            if dx * dx + dy * dy <= radius * radius {
                k[y * size + x] = 1.0;
            }
        }
    }
    if alias_sigma > 0.0 {
        k = blur_field(&k, size, size, alias_sigma);
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    (k, size)
}

pub(super) fn defocus(img: &Image, ctx: &Ctx<'_>) -> Image {
    let (kernel, size) = disk_kernel(ctx.param("radius"), ctx.param("alias_sigma"));
    FloatImage::from_image(img).convolve(&kernel, size).to_image()
}

/// Gaussian blur, then local pixel shuffling in reverse raster order, then blur again.
pub(super) fn glass(img: &Image, ctx: &Ctx<'_>) -> Image {
    let sigma = ctx.param("sigma");
    let delta = libm::round(ctx.param("max_delta")) as usize;
    let iterations = libm::round(ctx.param("iterations")) as usize;
    let mut buf = FloatImage::from_image(img).gaussian_blur(sigma);
    let (w, h) = (buf.width, buf.height);
    let stream = ctx.stream(0);
    let span = (2 * delta + 1) as f64;
    if w > 2 * delta && h > 2 * delta {
        for it in 0..iterations {
            for y in (delta..h - delta).rev() {
                for x in (delta..w - delta).rev() {
                    let mut rng = stream.at(((it * h + y) * w + x) as u64);
                    let dx = libm::floor(rng.next_f64() * span) as isize - delta as isize;
                    let dy = libm::floor(rng.next_f64() * span) as isize - delta as isize;
                    let sx = (x as isize + dx) as usize;
                    let sy = (y as isize + dy) as usize;
                    let a = buf.at(x, y);
                    let b = buf.at(sx, sy);
                    buf.put(x, y, b);
                    buf.put(sx, sy, a);
                }
            }
        }
    }
    buf.gaussian_blur(sigma).to_image()
}

/// One-sided streak along a seeded angle with Gaussian tap weights.
pub(super) fn motion(img: &Image, ctx: &Ctx<'_>) -> Image {
    let radius = libm::round(ctx.param("radius")) as usize;
    let sigma = ctx.param("sigma");
    let angle = (ctx.scene_stream(0).uniform(0) * 90.0 - 45.0).to_radians();
    let (dx, dy) = (libm::cos(angle), libm::sin(angle));
    let mut weights: Vec<f64> = (0..=radius)
        .map(|k| libm::exp(-((k * k) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|v| *v /= total);

    let src = FloatImage::from_image(img);
    let mut out = src.zeros_like();
    for y in 0..src.height {
        for x in 0..src.width {
            let mut acc = [0.0; 3];
            for (k, wgt) in weights.iter().enumerate() {
                let p = src.sample(x as f64 - k as f64 * dx, y as f64 - k as f64 * dy);
                acc[0] += wgt * p[0];
                acc[1] += wgt * p[1];
                acc[2] += wgt * p[2];
            }
            out.put(x, y, acc);
        }
    }
    out.to_image()
}

/// Zoom factors `1, 1 + step, ...` strictly below `max_zoom`.
pub(super) fn zoom_factors(max_zoom: f64, step: f64) -> Vec<f64> {
    let mut zooms = Vec::new();
    let mut k = 0u32;
    loop {
        let z = 1.0 + f64::from(k) * step;
        if z >= max_zoom - 1e-9 {
            break;
        }
        zooms.push(z);
        k += 1;
    }
    zooms
}

/// Average of the frame and progressively center-zoomed copies of it.
pub(super) fn zoom(img: &Image, ctx: &Ctx<'_>) -> Image {
    let zooms = zoom_factors(ctx.param("max_zoom"), ctx.param("step"));
    let src = FloatImage::from_image(img);
    let cx = (src.width as f64 - 1.0) / 2.0;
    let cy = (src.height as f64 - 1.0) / 2.0;
    let mut acc = src.clone();
    for &z in &zooms {
        for y in 0..src.height {
            for x in 0..src.width {
                let p = src.sample(cx + (x as f64 - cx) / z, cy + (y as f64 - cy) / z);
                let i = (y * src.width + x) * 3;
                acc.data[i] += p[0];
                acc.data[i + 1] += p[1];
                acc.data[i + 2] += p[2];
            }
        }
    }
    let n = (zooms.len() + 1) as f64;
    acc.data.iter_mut().for_each(|v| *v /= n);
    acc.to_image()
}
