//! PNG/JPEG raster IO. Everything is converted to 8-bit RGB on the way in;
//! alpha is dropped and grayscale is expanded.

use std::fs;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use segrobust_core::raster::{BinaryMask, Image};

use crate::error::{Error, Result};

pub const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

pub fn is_image_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|source| Error::UnreadableFile { path: path.to_path_buf(), source })
}

pub fn image_dims(path: &Path) -> Result<(u32, u32)> {
    image::image_dimensions(path).map_err(|source| Error::UnreadableFile { path: path.to_path_buf(), source })
}

pub fn read_image(path: &Path) -> Result<Image> {
    let rgb = open(path)?.into_rgb8();
    let (w, h) = rgb.dimensions();
    Ok(Image::new(w, h, rgb.into_raw())?)
}

/// Reads a raster as a binary mask: a pixel is foreground when any colour
/// channel is nonzero. Alpha is ignored.
pub fn read_binary_mask(path: &Path) -> Result<BinaryMask> {
    let rgb = open(path)?.into_rgb16();
    let (w, h) = rgb.dimensions();
    let values: Vec<u8> = rgb.pixels().map(|p| u8::from(p.0.iter().any(|c| *c != 0))).collect();
    Ok(BinaryMask::from_values(w, h, &values)?)
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::io(parent))?;
    }
    Ok(())
}

/// Encodes an RGB image as PNG in memory.
pub fn encode_png(img: &Image) -> Vec<u8> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(img.as_bytes(), img.width(), img.height(), ExtendedColorType::Rgb8)
        .expect("in-memory PNG encoding");
    out
}

pub fn write_png(path: &Path, img: &Image) -> Result<()> {
    write_bytes(path, &encode_png(img))
}

/// Writes a mask as an 8-bit grayscale PNG with values 0/255.
pub fn write_mask_png(path: &Path, mask: &BinaryMask) -> Result<()> {
    ensure_parent(path)?;
    let (w, h) = mask.dims();
    let gray = image::GrayImage::from_fn(w, h, |x, y| image::Luma([if mask.get(x, y) { 255 } else { 0 }]));
    gray.save_with_format(path, ImageFormat::Png)
        .map_err(|source| Error::UnreadableFile { path: path.to_path_buf(), source })
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).map_err(Error::io(path))
}
