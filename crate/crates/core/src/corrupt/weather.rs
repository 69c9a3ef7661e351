use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use super::buffer::{blur_field, FloatImage};
use super::rng::Stream;
use super::Ctx;
use crate::raster::Image;

/// Diamond-square fractal on a toroidal `size`×`size` grid (power of two),
/// rescaled to `[0, 1]`. `decay` divides the perturbation amplitude per octave.
pub(super) fn plasma_fractal(size: usize, decay: f64, stream: &Stream) -> Vec<f64> {
    debug_assert!(size.is_power_of_two());
    let mut map = vec![0.0f64; size * size];
    let mut step = size;
    let mut wibble = 100.0f64;
    let jitter = |idx: usize, wibble: f64| wibble * (stream.uniform(idx as u64) * 2.0 - 1.0) * wibble;
    while step >= 2 {
        let half = step / 2;
        let n = size / step;
        // Squares: centre of each cell from its four corners.
        for i in 0..n {
            for j in 0..n {
                let r0 = i * step;
                let c0 = j * step;
                let r1 = ((i + 1) % n) * step;
                let c1 = ((j + 1) % n) * step;
                let sum = map[r0 * size + c0] + map[r1 * size + c0] + map[r0 * size + c1] + map[r1 * size + c1];
                let idx = (r0 + half) * size + c0 + half;
                map[idx] = sum / 4.0 + jitter(idx, wibble);
            }
        }
        // Diamonds: edge midpoints from the two adjacent corners and centres.
        for i in 0..n {
            for j in 0..n {
                let r = i * step;
                let c = j * step;
                let up = ((i + n - 1) % n) * step + half;
                let right = ((j + 1) % n) * step;
                let sum = map[(r + half) * size + c + half]
                    + map[up * size + c + half]
                    + map[r * size + c]
                    + map[r * size + right];
                let idx = r * size + c + half;
                map[idx] = sum / 4.0 + jitter(idx, wibble);

                let left = ((j + n - 1) % n) * step + half;
                let down = ((i + 1) % n) * step;
                let sum = map[(r + half) * size + c + half]
                    + map[(r + half) * size + left]
                    + map[r * size + c]
                    + map[down * size + c];
                let idx = (r + half) * size + c;
                map[idx] = sum / 4.0 + jitter(idx, wibble);
            }
        }
        step /= 2;
        wibble /= decay;
    }
    let min = map.iter().copied().fold(f64::INFINITY, f64::min);
    map.iter_mut().for_each(|v| *v -= min);
    let max = map.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        map.iter_mut().for_each(|v| *v /= max);
    }
    map
}

pub(super) fn fog(img: &Image, ctx: &Ctx<'_>) -> Image {
    let strength = ctx.param("strength");
    let mut buf = FloatImage::from_image(img);
    let size = buf.width.max(buf.height).next_power_of_two().max(2);
    let plasma = plasma_fractal(size, ctx.param("decay"), &ctx.scene_stream(0));
    let max_val = buf.data.iter().copied().fold(0.0, f64::max);
    let scale = if max_val + strength > 0.0 { max_val / (max_val + strength) } else { 1.0 };
    for y in 0..buf.height {
        for x in 0..buf.width {
            let f = strength * plasma[y * size + x];
            let i = (y * buf.width + x) * 3;
            for v in &mut buf.data[i..i + 3] {
                *v = (*v + f) * scale;
            }
        }
    }
    buf.to_image()
}

/// Whitened frame plus seeded flakes streaked along a steep falling angle.
pub(super) fn snow(img: &Image, ctx: &Ctx<'_>) -> Image {
    let density = ctx.param("density");
    let length = libm::round(ctx.param("length")) as usize;
    let whiten = ctx.param("whiten");
    let mut buf = FloatImage::from_image(img);
    let (w, h) = (buf.width, buf.height);

    let flakes = ctx.scene_stream(0);
    let angle = (ctx.scene_stream(1).uniform(0) * 90.0 + 45.0).to_radians();
    let (dx, dy) = (libm::cos(angle), libm::sin(angle));
    let mut layer = vec![false; w * h];
    for i in 0..w * h {
        if flakes.uniform(i as u64) >= density {
            continue;
        }
        let (fx, fy) = ((i % w) as f64, (i / w) as f64);
        for k in 0..length.max(1) {
            let x = libm::round(fx + k as f64 * dx);
            let y = libm::round(fy + k as f64 * dy);
            if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
                layer[y as usize * w + x as usize] = true;
            }
        }
    }

    for (p, flake) in layer.iter().enumerate() {
        let px = &mut buf.data[p * 3..p * 3 + 3];
        if *flake {
            px.iter_mut().for_each(|v| *v = 1.0);
            continue;
        }
        let gray = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        let lifted = gray * 1.5 + 0.5;
        for v in px.iter_mut() {
            *v = (1.0 - whiten) * *v + whiten * v.max(lifted);
        }
    }
    buf.to_image()
}

/// Smooth random liquid blobs blended over the frame in a pale water tint.
pub(super) fn spatter(img: &Image, ctx: &Ctx<'_>) -> Image {
    const TINT: [f64; 3] = [0.69, 0.93, 0.93];
    let threshold = ctx.param("threshold");
    let opacity = ctx.param("opacity");
    let scale = ctx.param("scale");
    let mut buf = FloatImage::from_image(img);
    let (w, h) = (buf.width, buf.height);
    let stream = ctx.scene_stream(0);
    let raw: Vec<f64> = (0..w * h).map(|i| StandardNormal.sample(&mut stream.at(i as u64))).collect();
    let field = standardize(blur_field(&raw, w, h, scale));
    for (p, f) in field.iter().enumerate() {
        let cover = ((f - threshold) * 2.0).clamp(0.0, 1.0) * opacity;
        if cover == 0.0 {
            continue;
        }
        for (v, t) in buf.data[p * 3..p * 3 + 3].iter_mut().zip(TINT) {
            *v = (1.0 - cover) * *v + cover * t;
        }
    }
    buf.to_image()
}

/// Rescales a zero-mean field to unit root-mean-square.
pub(super) fn standardize(mut field: Vec<f64>) -> Vec<f64> {
    let n = field.len() as f64;
    let mean = field.iter().sum::<f64>() / n;
    field.iter_mut().for_each(|v| *v -= mean);
    let rms = libm::sqrt(field.iter().map(|v| v * v).sum::<f64>() / n);
    if rms > 0.0 {
        field.iter_mut().for_each(|v| *v /= rms);
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plasma_spans_unit_interval() {
        let p = plasma_fractal(32, 2.0, &Stream::new(1, 9, 1, 0));
        let min = p.iter().copied().fold(f64::INFINITY, f64::min);
        let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, 0.0);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn standardize_yields_unit_rms() {
        let f = standardize((0..100).map(f64::from).collect());
        let rms = libm::sqrt(f.iter().map(|v| v * v).sum::<f64>() / 100.0);
        assert!((rms - 1.0).abs() < 1e-12);
    }
}
