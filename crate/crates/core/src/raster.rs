//! RGB images, bit-packed binary masks and the run-length codec.
//!
//! Masks are stored row-major, one bit per pixel, packed little-endian into
//! `u64` words with no per-row padding. Bits past `width * height` in the last
//! word are always zero, so word-wise popcounts are exact.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RasterError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("expected {expected} bytes of RGB data, got {actual}")]
    DataLength { expected: usize, actual: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RleError {
    #[error("run lengths sum to {actual}, expected width*height = {expected}")]
    SumMismatch { expected: u64, actual: u64 },
    #[error("zero-length run at position {index} (only the first run may be empty)")]
    MalformedRuns { index: usize },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

fn check_dims(width: u32, height: u32) -> Result<usize, RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::EmptyDimensions { width, height });
    }
    Ok(width as usize * height as usize)
}

/// 8-bit RGB raster, row-major, interleaved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl core::fmt::Debug for Image {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, RasterError> {
        let expected = check_dims(width, height)? * 3;
        if data.len() != expected {
            return Err(RasterError::DataLength { expected, actual: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, RasterError> {
        let n = check_dims(width, height)?;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&rgb);
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [u8; 3],
    ) -> Result<Self, RasterError> {
        let n = check_dims(width, height)?;
        let mut data = Vec::with_capacity(n * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Binary raster with one bit per pixel.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    words: Vec<u64>,
}

impl core::fmt::Debug for BinaryMask {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BinaryMask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("area", &self.area())
            .finish()
    }
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Result<Self, RasterError> {
        let n = check_dims(width, height)?;
        Ok(Self { width, height, words: vec![0; n.div_ceil(64)] })
    }

    pub fn full(width: u32, height: u32) -> Result<Self, RasterError> {
        let mut m = Self::empty(width, height)?;
        m.set_run(0, m.len());
        Ok(m)
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> bool,
    ) -> Result<Self, RasterError> {
        let mut m = Self::empty(width, height)?;
        let mut i = 0;
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.words[i >> 6] |= 1 << (i & 63);
                }
                i += 1;
            }
        }
        Ok(m)
    }

    /// Builds a mask from a row-major slice where any nonzero value is foreground.
    pub fn from_values(width: u32, height: u32, values: &[u8]) -> Result<Self, RasterError> {
        let n = check_dims(width, height)?;
        if values.len() != n {
            return Err(RasterError::DataLength { expected: n, actual: values.len() });
        }
        let mut m = Self::empty(width, height)?;
        for (i, _) in values.iter().enumerate().filter(|(_, v)| **v != 0) {
            m.words[i >> 6] |= 1 << (i & 63);
        }
        Ok(m)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Number of pixels (not set pixels).
    pub fn len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.get_index(y as usize * self.width as usize + x as usize)
    }

    #[inline]
    pub fn get_index(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = y as usize * self.width as usize + x as usize;
        if value {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    /// Sets `len` consecutive bits starting at linear index `start`.
    fn set_run(&mut self, start: usize, len: usize) {
        let mut i = start;
        let end = start + len;
        while i < end {
            let bit = i & 63;
            let take = (64 - bit).min(end - i);
            let chunk = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << bit };
            self.words[i >> 6] |= chunk;
            i += take;
        }
    }

    /// Number of set pixels, always recomputed from the bits.
    pub fn area(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    fn check_same_dims(&self, other: &Self) -> Result<(), RasterError> {
        if self.dims() != other.dims() {
            return Err(RasterError::DimensionMismatch { left: self.dims(), right: other.dims() });
        }
        Ok(())
    }

    pub fn intersection_area(&self, other: &Self) -> Result<u64, RasterError> {
        self.check_same_dims(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum())
    }

    pub fn union_area(&self, other: &Self) -> Result<u64, RasterError> {
        self.check_same_dims(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a | b).count_ones()))
            .sum())
    }

    pub fn union_with(&mut self, other: &Self) -> Result<(), RasterError> {
        self.check_same_dims(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool, RasterError> {
        self.check_same_dims(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    /// Linear indices of set pixels in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut word = w;
            core::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * 64 + b)
            })
            .filter(move |i| *i < n)
        })
    }
}

/// Number of foreground pixels of `mask`.
pub fn mask_area(mask: &BinaryMask) -> u64 {
    mask.area()
}

/// Row-major run lengths. `counts[0]` counts leading zeros and may be 0;
/// afterwards runs alternate 1/0 and are all positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    pub counts: Vec<u32>,
}

pub fn rle_encode(mask: &BinaryMask) -> RleMask {
    let n = mask.len();
    let mut counts = Vec::new();
    let mut current = false;
    let mut run: u32 = 0;
    let mut i = 0;
    while i < n {
        // Skip whole words that continue the current run.
        if i & 63 == 0 && i + 64 <= n {
            let w = mask.words[i >> 6];
            if (current && w == u64::MAX) || (!current && w == 0) {
                run += 64;
                i += 64;
                continue;
            }
        }
        let v = mask.get_index(i);
        if v != current {
            counts.push(run);
            run = 0;
            current = v;
        }
        run += 1;
        i += 1;
    }
    counts.push(run);
    RleMask { width: mask.width, height: mask.height, counts }
}

pub fn rle_decode(rle: &RleMask) -> Result<BinaryMask, RleError> {
    let n = check_dims(rle.width, rle.height)? as u64;
    let actual: u64 = rle.counts.iter().map(|c| u64::from(*c)).sum();
    if actual != n {
        return Err(RleError::SumMismatch { expected: n, actual });
    }
    if let Some(index) = rle.counts.iter().skip(1).position(|c| *c == 0) {
        return Err(RleError::MalformedRuns { index: index + 1 });
    }
    let mut mask = BinaryMask::empty(rle.width, rle.height)?;
    let mut pos = 0usize;
    for (k, &c) in rle.counts.iter().enumerate() {
        if k % 2 == 1 {
            mask.set_run(pos, c as usize);
        }
        pos += c as usize;
    }
    Ok(mask)
}
