//! Normalized floating-point working buffer shared by the corruption kernels.

use alloc::vec;
use alloc::vec::Vec;

use crate::raster::Image;

/// Interleaved RGB samples in `[0, 1]` (values may leave the range mid-pipeline).
#[derive(Clone, Debug)]
pub(crate) struct FloatImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

/// Clamp to `[0, 1]`, scale to 8 bits and round half to even.
#[inline]
pub(crate) fn quantize(v: f64) -> u8 {
    libm::rint(v.clamp(0.0, 1.0) * 255.0) as u8
}

impl FloatImage {
    pub fn from_image(img: &Image) -> Self {
        Self {
            width: img.width() as usize,
            height: img.height() as usize,
            data: img.as_bytes().iter().map(|v| f64::from(*v) / 255.0).collect(),
        }
    }

    pub fn to_image(&self) -> Image {
        let data = self.data.iter().map(|v| quantize(*v)).collect();
        Image::new(self.width as u32, self.height as u32, data).expect("buffer keeps image shape")
    }

    pub fn zeros_like(&self) -> Self {
        Self { width: self.width, height: self.height, data: vec![0.0; self.data.len()] }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, v: [f64; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&v);
    }

    /// Bilinear sample at continuous pixel-center coordinates, clamped to the edge.
    pub fn sample(&self, fx: f64, fy: f64) -> [f64; 3] {
        let maxx = (self.width - 1) as f64;
        let maxy = (self.height - 1) as f64;
        let fx = fx.clamp(0.0, maxx);
        let fy = fy.clamp(0.0, maxy);
        let x0 = libm::floor(fx) as usize;
        let y0 = libm::floor(fy) as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let tx = fx - x0 as f64;
        let ty = fy - y0 as f64;
        let a = self.at(x0, y0);
        let b = self.at(x1, y0);
        let c = self.at(x0, y1);
        let d = self.at(x1, y1);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let top = a[k] + (b[k] - a[k]) * tx;
            let bottom = c[k] + (d[k] - c[k]) * tx;
            out[k] = top + (bottom - top) * ty;
        }
        out
    }

    pub fn gaussian_blur(&self, sigma: f64) -> Self {
        let kernel = gaussian_kernel(sigma);
        separable(self, &kernel)
    }

    /// Dense 2-D convolution with a square odd-sized kernel, edge-clamped.
    pub fn convolve(&self, kernel: &[f64], size: usize) -> Self {
        let r = (size / 2) as isize;
        let mut out = self.zeros_like();
        let (w, h) = (self.width as isize, self.height as isize);
        for y in 0..h {
            for x in 0..w {
                let mut acc = [0.0; 3];
                for ky in 0..size as isize {
                    let sy = (y + ky - r).clamp(0, h - 1) as usize;
                    for kx in 0..size as isize {
                        let wgt = kernel[(ky as usize) * size + kx as usize];
                        if wgt == 0.0 {
                            continue;
                        }
                        let sx = (x + kx - r).clamp(0, w - 1) as usize;
                        let p = self.at(sx, sy);
                        acc[0] += wgt * p[0];
                        acc[1] += wgt * p[1];
                        acc[2] += wgt * p[2];
                    }
                }
                out.put(x as usize, y as usize, acc);
            }
        }
        out
    }
}

/// Normalized 1-D Gaussian taps, truncated at three standard deviations.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (libm::ceil(3.0 * sigma) as usize).max(1);
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            libm::exp(-d * d / (2.0 * sigma * sigma))
        })
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn separable(src: &FloatImage, kernel: &[f64]) -> FloatImage {
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (src.width as isize, src.height as isize);
    let mut tmp = src.zeros_like();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for (k, wgt) in kernel.iter().enumerate() {
                let sx = (x + k as isize - r).clamp(0, w - 1) as usize;
                let p = src.at(sx, y as usize);
                acc[0] += wgt * p[0];
                acc[1] += wgt * p[1];
                acc[2] += wgt * p[2];
            }
            tmp.put(x as usize, y as usize, acc);
        }
    }
    let mut out = src.zeros_like();
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for (k, wgt) in kernel.iter().enumerate() {
                let sy = (y + k as isize - r).clamp(0, h - 1) as usize;
                let p = tmp.at(x as usize, sy);
                acc[0] += wgt * p[0];
                acc[1] += wgt * p[1];
                acc[2] += wgt * p[2];
            }
            out.put(x as usize, y as usize, acc);
        }
    }
    out
}

/// Blurs a single-channel field with the same separable Gaussian.
pub(crate) fn blur_field(field: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;
    let (w, h) = (width as isize, height as isize);
    let mut tmp = vec![0.0; field.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wgt) in kernel.iter().enumerate() {
                let sx = (x + k as isize - r).clamp(0, w - 1);
                acc += wgt * field[(y * w + sx) as usize];
            }
            tmp[(y * w + x) as usize] = acc;
        }
    }
    let mut out = vec![0.0; field.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, wgt) in kernel.iter().enumerate() {
                let sy = (y + k as isize - r).clamp(0, h - 1);
                acc += wgt * tmp[(sy * w + x) as usize];
            }
            out[(y * w + x) as usize] = acc;
        }
    }
    out
}
