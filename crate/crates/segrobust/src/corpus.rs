//! Batch corruption of a directory of frames.
//!
//! Outputs go to `<out>/<kind>/s<severity>/<stem>.png` and are listed in
//! `<out>/manifest.csv` (`frame,kind,severity,seed,path,sha256`), sorted by
//! frame, kind and severity. The per-frame seed is derived from the run seed
//! and the frame stem, so a frame corrupts the same way whatever else is in
//! the directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use segrobust_core::corrupt::rng::derive_seed;
use segrobust_core::corrupt::{apply_corruption, CorruptError, CorruptionKind, CorruptionSpec, SeverityTable, MAX_SEVERITY};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::list_images;
use crate::error::{Error, Result};
use crate::io;

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManifestRow {
    pub frame: String,
    pub kind: String,
    pub severity: u8,
    pub seed: u64,
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptOptions {
    pub kinds: Vec<CorruptionKind>,
    pub severities: Vec<u8>,
    pub seed: u64,
    pub table: SeverityTable,
}

/// Seed used for every corruption of the frame `stem`.
pub fn frame_seed(seed: u64, stem: &str) -> u64 {
    derive_seed(seed, stem.as_bytes())
}

/// `<kind>/s<severity>/<stem>.png`
pub fn relative_output_path(kind: CorruptionKind, severity: u8, stem: &str) -> String {
    format!("{kind}/s{severity}/{stem}.png")
}

/// The frames directory of `input`: `input/images` when present, else `input`.
pub fn frames_dir(input: &Path) -> PathBuf {
    let images = input.join("images");
    if images.is_dir() {
        images
    } else {
        input.to_path_buf()
    }
}

pub fn corrupt_corpus(input: &Path, out: &Path, opts: &CorruptOptions) -> Result<Vec<ManifestRow>> {
    if let Some(&s) = opts.severities.iter().find(|&&s| s > MAX_SEVERITY) {
        return Err(CorruptError::InvalidSeverity(s).into());
    }
    let frames: Vec<(String, PathBuf)> = list_images(&frames_dir(input))?.into_iter().collect();
    let units: Vec<(CorruptionKind, u8)> =
        opts.kinds.iter().flat_map(|&k| opts.severities.iter().map(move |&s| (k, s))).collect();

    let mut rows: Vec<ManifestRow> = if units.is_empty() {
        Vec::new()
    } else {
        let per_frame: Vec<Vec<ManifestRow>> = frames
            .par_iter()
            .map(|(stem, path)| {
                let img = io::read_image(path)?;
                let seed = frame_seed(opts.seed, stem);
                units
                    .par_iter()
                    .map(|&(kind, severity)| {
                        let out_img = apply_corruption(&img, CorruptionSpec::new(kind, severity, seed)?, &opts.table)?;
                        let bytes = io::encode_png(&out_img);
                        let rel = relative_output_path(kind, severity, stem);
                        io::write_bytes(&out.join(&rel), &bytes)?;
                        Ok(ManifestRow {
                            frame: stem.clone(),
                            kind: kind.to_string(),
                            severity,
                            seed,
                            path: rel,
                            sha256: hex::encode(Sha256::digest(&bytes)),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        per_frame.into_iter().flatten().collect()
    };
    rows.sort();
    write_manifest(&out.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["frame", "kind", "severity", "seed", "path", "sha256"]).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().expect("flush to memory");
    io::write_bytes(path, &bytes)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)
}
