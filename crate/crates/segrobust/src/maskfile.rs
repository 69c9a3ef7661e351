//! Sub-mask interchange documents (`<frame_stem>.masks.json`).
//!
//! One compact UTF-8 JSON object per frame:
//!
//! ```json
//! {"schema_version":1,"image_id":"frame_000","width":4,"height":3,
//!  "segmenter":{"name":"...","version":"..."},
//!  "masks":[{"id":0,"counts":[5,2,5],"area":2}]}
//! ```
//!
//! `counts` is the row-major RLE of the mask: the first run counts zeros
//! (possibly 0), runs then alternate ones/zeros, and only the first run may be
//! empty. Masks are written in ascending id order.

use std::fs;
use std::path::{Path, PathBuf};

use segrobust_core::maskalg::{MaskAlgError, SubMask, SubMaskSet};
use segrobust_core::raster::{rle_decode, rle_encode, RleMask};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

pub const SCHEMA_VERSION: u32 = 1;
pub const FILE_SUFFIX: &str = ".masks.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskEntry {
    pub id: u32,
    pub counts: Vec<u32>,
    pub area: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFileDocument {
    pub schema_version: u32,
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub segmenter: SegmenterInfo,
    pub masks: Vec<MaskEntry>,
}

/// A validated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedMasks {
    pub set: SubMaskSet,
    pub segmenter: SegmenterInfo,
    /// Zero-area masks removed during validation.
    pub dropped_empty: usize,
}

/// `<dir>/<stem>.masks.json`
pub fn document_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}{FILE_SUFFIX}"))
}

impl MaskFileDocument {
    pub fn from_set(set: &SubMaskSet, segmenter: &SegmenterInfo) -> Self {
        let (width, height) = set.dims();
        let masks = set
            .masks()
            .iter()
            .map(|m| MaskEntry { id: m.id, counts: rle_encode(&m.mask).counts, area: m.mask.area() })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            image_id: set.frame_id().to_owned(),
            width,
            height,
            segmenter: segmenter.clone(),
            masks,
        }
    }

    /// Stable serialization: compact JSON plus a trailing newline.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("document serializes");
        out.push(b'\n');
        out
    }

    /// Decodes and validates into a [`SubMaskSet`]; `path` is only used in errors.
    pub fn validate(&self, path: &Path) -> Result<LoadedMasks> {
        let schema = |message: String| Error::Schema { path: path.to_path_buf(), message };
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(schema(format!("invalid dimensions {}x{}", self.width, self.height)));
        }
        let mut masks = Vec::with_capacity(self.masks.len());
        for entry in &self.masks {
            let rle = RleMask { width: self.width, height: self.height, counts: entry.counts.clone() };
            let mask = rle_decode(&rle).map_err(|source| Error::Rle { path: path.to_path_buf(), id: entry.id, source })?;
            let actual = mask.area();
            if actual != entry.area {
                return Err(Error::AreaMismatch { path: path.to_path_buf(), id: entry.id, declared: entry.area, actual });
            }
            masks.push(SubMask { id: entry.id, mask });
        }
        let (set, dropped_empty) =
            SubMaskSet::filtered(self.image_id.clone(), self.width, self.height, masks).map_err(|e| match e {
                MaskAlgError::DuplicateMaskId(id) => Error::DuplicateMaskId { path: path.to_path_buf(), id },
                e => Error::MaskAlg(e),
            })?;
        Ok(LoadedMasks { set, segmenter: self.segmenter.clone(), dropped_empty })
    }
}

pub fn write_masks(set: &SubMaskSet, segmenter: &SegmenterInfo, path: &Path) -> Result<()> {
    io::write_bytes(path, &MaskFileDocument::from_set(set, segmenter).to_bytes())
}

pub fn parse_document(bytes: &[u8], path: &Path) -> Result<MaskFileDocument> {
    serde_json::from_slice(bytes).map_err(|e| Error::Schema { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_masks(path: &Path) -> Result<LoadedMasks> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingMaskDocument(path.to_path_buf()))
        }
        Err(source) => return Err(Error::Io { path: path.to_path_buf(), source }),
    };
    let loaded = parse_document(&bytes, path)?.validate(path)?;
    if loaded.dropped_empty > 0 {
        log::warn!("{}: dropped {} zero-area mask(s)", path.display(), loaded.dropped_empty);
    }
    Ok(loaded)
}
