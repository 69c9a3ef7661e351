//! Corpus ingestion for the paired-directory layout:
//!
//! ```text
//! root/images/<stem>.png|jpg   frames
//! root/gt/<stem>.png           ground-truth tool masks (nonzero = tool)
//! root/conditions.csv          optional: frame,condition,level
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use segrobust_core::raster::{BinaryMask, Image};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    #[default]
    PairedDirs,
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paired-dirs" => Ok(Layout::PairedDirs),
            other => Err(Error::InvalidArgument(format!("unknown corpus layout `{other}`"))),
        }
    }
}

/// Real (captured) corruption label of a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub label: String,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub id: String,
    pub image_path: PathBuf,
    pub gt_path: PathBuf,
    pub condition: Option<Condition>,
}

impl Frame {
    pub fn load_image(&self) -> Result<Image> {
        io::read_image(&self.image_path)
    }

    pub fn load_gt(&self, expected: (u32, u32)) -> Result<BinaryMask> {
        load_gt_mask(&self.gt_path, expected).map_err(|e| match e {
            Error::DimensionMismatch { expected, found, .. } => {
                Error::DimensionMismatch { stem: self.id.clone(), expected, found }
            }
            e => e,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    pub root: PathBuf,
    pub frames: Vec<Frame>,
}

impl Corpus {
    pub fn has_conditions(&self) -> bool {
        self.frames.iter().any(|f| f.condition.is_some())
    }
}

#[derive(Deserialize)]
struct ConditionRow {
    frame: String,
    condition: String,
    level: u8,
}

fn stem_of(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_owned)
}

/// Image files directly under `dir`, keyed by stem.
pub(crate) fn list_images(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(Error::io(dir))? {
        let path = entry.map_err(Error::io(dir))?.path();
        if !path.is_file() || !io::is_image_path(&path) {
            continue;
        }
        let Some(stem) = stem_of(&path) else { continue };
        if out.insert(stem.clone(), path).is_some() {
            return Err(Error::DuplicateFrame(stem));
        }
    }
    Ok(out)
}

fn read_conditions(path: &Path) -> Result<HashMap<String, Condition>> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| Error::Csv { path: path.into(), source })?;
    let mut out = HashMap::new();
    for row in reader.deserialize::<ConditionRow>() {
        let row = row.map_err(|source| Error::Csv { path: path.into(), source })?;
        out.insert(row.frame, Condition { label: row.condition, level: row.level });
    }
    Ok(out)
}

/// Pairs every frame under `root/images` with `root/gt/<stem>.png`, sorted by stem.
pub fn load_corpus(root: &Path, layout: Layout) -> Result<Corpus> {
    let Layout::PairedDirs = layout;
    let images = list_images(&root.join("images"))?;
    if images.is_empty() {
        return Err(Error::EmptyCorpus(root.to_path_buf()));
    }
    let conditions_path = root.join("conditions.csv");
    let mut conditions =
        if conditions_path.is_file() { read_conditions(&conditions_path)? } else { HashMap::new() };

    let gt_dir = root.join("gt");
    let mut frames = Vec::with_capacity(images.len());
    for (stem, image_path) in images {
        let gt_path = gt_dir.join(format!("{stem}.png"));
        if !gt_path.is_file() {
            return Err(Error::MissingGroundTruth(stem));
        }
        let expected = io::image_dims(&image_path)?;
        let found = io::image_dims(&gt_path)?;
        if expected != found {
            return Err(Error::DimensionMismatch { stem, expected, found });
        }
        let condition = conditions.remove(&stem);
        frames.push(Frame { id: stem, image_path, gt_path, condition });
    }
    let name = root
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("corpus")
        .to_owned();
    Ok(Corpus { name, root: root.to_path_buf(), frames })
}

/// Loads and binarizes a ground-truth raster (any nonzero channel = tool).
pub fn load_gt_mask(path: &Path, expected: (u32, u32)) -> Result<BinaryMask> {
    let mask = io::read_binary_mask(path)?;
    if mask.dims() != expected {
        return Err(Error::DimensionMismatch {
            stem: stem_of(path).unwrap_or_default(),
            expected,
            found: mask.dims(),
        });
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, RgbImage};

    fn write_rgb(path: &Path, w: u32, h: u32, f: impl Fn(u32, u32) -> [u8; 3]) {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        RgbImage::from_fn(w, h, |x, y| Rgb(f(x, y))).save(path).unwrap();
    }

    #[test]
    fn pairs_frames_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        for stem in ["b", "a"] {
            write_rgb(&root.join(format!("images/{stem}.png")), 4, 3, |_, _| [1, 2, 3]);
            write_rgb(&root.join(format!("gt/{stem}.png")), 4, 3, |_, _| [0, 0, 0]);
        }
        let corpus = load_corpus(root, Layout::PairedDirs).unwrap();
        let ids: Vec<_> = corpus.frames.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert!(!corpus.has_conditions());
    }

    #[test]
    fn missing_gt_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_rgb(&dir.path().join("images/a.png"), 4, 3, |_, _| [1, 2, 3]);
        fs::create_dir_all(dir.path().join("gt")).unwrap();
        assert!(matches!(
            load_corpus(dir.path(), Layout::PairedDirs),
            Err(Error::MissingGroundTruth(s)) if s == "a"
        ));
    }

    #[test]
    fn dimension_mismatch_and_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir_all(dir.path().join("images")).unwrap();
        assert!(matches!(load_corpus(dir.path(), Layout::PairedDirs), Err(Error::EmptyCorpus(_))));
        write_rgb(&dir.path().join("images/a.png"), 4, 3, |_, _| [1, 2, 3]);
        write_rgb(&dir.path().join("gt/a.png"), 3, 3, |_, _| [0, 0, 0]);
        assert!(matches!(
            load_corpus(dir.path(), Layout::PairedDirs),
            Err(Error::DimensionMismatch { stem, .. }) if stem == "a"
        ));
    }

    #[test]
    fn gt_binarization() {
        let dir = tempfile::tempdir().unwrap();
        let black = dir.path().join("black.png");
        let white = dir.path().join("white.png");
        let mixed = dir.path().join("mixed.png");
        write_rgb(&black, 6, 5, |_, _| [0, 0, 0]);
        write_rgb(&white, 6, 5, |_, _| [255, 255, 255]);
        // Red channel set on exactly 10 pixels.
        let red = |x: u32, y: u32| y < 2 && x < 5;
        write_rgb(&mixed, 6, 5, |x, y| if red(x, y) { [7, 0, 0] } else { [0, 0, 0] });
        assert_eq!(load_gt_mask(&black, (6, 5)).unwrap().area(), 0);
        assert_eq!(load_gt_mask(&white, (6, 5)).unwrap().area(), 30);
        let m = load_gt_mask(&mixed, (6, 5)).unwrap();
        let mut oracle = 0;
        for y in 0..5 {
            for x in 0..6 {
                oracle += u64::from(red(x, y));
            }
        }
        assert_eq!(m.area(), oracle);
        assert_eq!(oracle, 10);
        assert!(matches!(load_gt_mask(&mixed, (5, 5)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            load_gt_mask(&dir.path().join("nope.png"), (5, 5)),
            Err(Error::UnreadableFile { .. })
        ));
    }

    #[test]
    fn gt_with_0_255_values_counts_255s() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gt.png");
        let gray = image::GrayImage::from_fn(8, 8, |x, y| image::Luma([if (x * y) % 3 == 0 { 255 } else { 0 }]));
        gray.save(&p).unwrap();
        let expected = gray.pixels().filter(|p| p.0[0] == 255).count() as u64;
        assert_eq!(load_gt_mask(&p, (8, 8)).unwrap().area(), expected);
    }

    #[test]
    fn binarization_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("src.png");
        write_rgb(&src, 7, 7, |x, y| [(x * 40) as u8, 0, (y % 2) as u8]);
        let once = load_gt_mask(&src, (7, 7)).unwrap();
        let again = dir.path().join("again.png");
        io::write_mask_png(&again, &once).unwrap();
        assert_eq!(load_gt_mask(&again, (7, 7)).unwrap(), once);
    }

    #[test]
    fn conditions_sidecar_is_attached() {
        let dir = tempfile::tempdir().unwrap();
        for stem in ["a", "b"] {
            write_rgb(&dir.path().join(format!("images/{stem}.jpg")), 4, 4, |_, _| [9, 9, 9]);
            write_rgb(&dir.path().join(format!("gt/{stem}.png")), 4, 4, |_, _| [0, 0, 0]);
        }
        fs::write(dir.path().join("conditions.csv"), "frame,condition,level\na,smoke,1\n").unwrap();
        let corpus = load_corpus(dir.path(), Layout::PairedDirs).unwrap();
        assert_eq!(corpus.frames[0].condition, Some(Condition { label: "smoke".into(), level: 1 }));
        assert_eq!(corpus.frames[1].condition, None);
    }
}
