//! Consolidation of a segmenter's sub-masks against a ground-truth region.
//!
//! A sub-mask belongs to the region when the fraction of its own pixels that
//! fall inside the region, `sum(roi * sub) / sum(sub)`, is strictly above a
//! threshold (0.5 by default). From the selected sub-masks two predictions are
//! built: the single largest one, and the pixel-wise union of all of them.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{BinaryMask, RasterError};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaskAlgError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("sub-mask {id:?} has zero area")]
    EmptySubMask { id: Option<u32> },
    #[error("no sub-mask overlaps the region")]
    EmptySelection,
    #[error("duplicate mask id {0}")]
    DuplicateMaskId(u32),
    #[error("selection refers to mask id {0}, which is not in the set")]
    UnknownMaskId(u32),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Raster(RasterError),
}

impl From<RasterError> for MaskAlgError {
    fn from(e: RasterError) -> Self {
        match e {
            RasterError::DimensionMismatch { left, right } => Self::DimensionMismatch { left, right },
            other => Self::Raster(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubMask {
    pub id: u32,
    pub mask: BinaryMask,
}

/// Sub-masks of one frame: ids unique and ascending, every mask non-empty,
/// all with the same dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubMaskSet {
    frame_id: String,
    width: u32,
    height: u32,
    masks: Vec<SubMask>,
}

impl SubMaskSet {
    /// Validates and sorts `masks`. Zero-area masks are an error here; use
    /// [`SubMaskSet::filtered`] at ingestion boundaries.
    pub fn new(frame_id: impl Into<String>, width: u32, height: u32, masks: Vec<SubMask>) -> Result<Self, MaskAlgError> {
        let (set, dropped) = Self::build(frame_id.into(), width, height, masks, false)?;
        debug_assert_eq!(dropped, 0);
        Ok(set)
    }

    /// Like [`SubMaskSet::new`] but drops zero-area masks, returning how many were dropped.
    pub fn filtered(
        frame_id: impl Into<String>,
        width: u32,
        height: u32,
        masks: Vec<SubMask>,
    ) -> Result<(Self, usize), MaskAlgError> {
        Self::build(frame_id.into(), width, height, masks, true)
    }

    fn build(
        frame_id: String,
        width: u32,
        height: u32,
        mut masks: Vec<SubMask>,
        drop_empty: bool,
    ) -> Result<(Self, usize), MaskAlgError> {
        for m in &masks {
            if m.mask.dims() != (width, height) {
                return Err(MaskAlgError::DimensionMismatch { left: (width, height), right: m.mask.dims() });
            }
        }
        let before = masks.len();
        if drop_empty {
            masks.retain(|m| !m.mask.is_empty());
        } else if let Some(m) = masks.iter().find(|m| m.mask.is_empty()) {
            return Err(MaskAlgError::EmptySubMask { id: Some(m.id) });
        }
        let dropped = before - masks.len();
        masks.sort_by_key(|m| m.id);
        if let Some(pair) = masks.windows(2).find(|p| p[0].id == p[1].id) {
            return Err(MaskAlgError::DuplicateMaskId(pair[0].id));
        }
        Ok((Self { frame_id, width, height, masks }, dropped))
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn masks(&self) -> &[SubMask] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&BinaryMask> {
        self.masks.binary_search_by_key(&id, |m| m.id).ok().map(|i| &self.masks[i].mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selected {
    pub mask_id: u32,
    pub ratio: f64,
}

/// Sub-masks whose intersection ratio strictly exceeds `threshold`, in id order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapSelection {
    pub frame_id: String,
    pub threshold: f64,
    pub selected: Vec<Selected>,
}

impl OverlapSelection {
    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }
}

/// Fraction of `sub`'s pixels lying inside `roi`.
pub fn intersection_ratio(sub: &BinaryMask, roi: &BinaryMask) -> Result<f64, MaskAlgError> {
    let inside = sub.intersection_area(roi)?;
    let area = sub.area();
    if area == 0 {
        return Err(MaskAlgError::EmptySubMask { id: None });
    }
    Ok(inside as f64 / area as f64)
}

pub fn select_overlapping(set: &SubMaskSet, roi: &BinaryMask, threshold: f64) -> Result<OverlapSelection, MaskAlgError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(MaskAlgError::InvalidThreshold(threshold));
    }
    if set.dims() != roi.dims() {
        return Err(MaskAlgError::DimensionMismatch { left: set.dims(), right: roi.dims() });
    }
    let mut selected = Vec::new();
    for m in set.masks() {
        let ratio = intersection_ratio(&m.mask, roi).map_err(|e| match e {
            MaskAlgError::EmptySubMask { .. } => MaskAlgError::EmptySubMask { id: Some(m.id) },
            e => e,
        })?;
        if ratio > threshold {
            selected.push(Selected { mask_id: m.id, ratio });
        }
    }
    Ok(OverlapSelection { frame_id: set.frame_id.clone(), threshold, selected })
}

/// The selected sub-mask of maximum area; ties go to the lowest mask id.
pub fn best_single_mask<'a>(selection: &OverlapSelection, set: &'a SubMaskSet) -> Result<&'a BinaryMask, MaskAlgError> {
    let mut best: Option<(u64, &BinaryMask)> = None;
    // Selection is in ascending id order, so strict `>` keeps the lowest id on ties.
    for s in &selection.selected {
        let mask = set.get(s.mask_id).ok_or(MaskAlgError::UnknownMaskId(s.mask_id))?;
        let area = mask.area();
        if best.map_or(true, |(a, _)| area > a) {
            best = Some((area, mask));
        }
    }
    best.map(|(_, m)| m).ok_or(MaskAlgError::EmptySelection)
}

/// Pixel-wise sum of the selected sub-masks, saturated at 1.
pub fn combine_masks(selection: &OverlapSelection, set: &SubMaskSet) -> Result<BinaryMask, MaskAlgError> {
    let mut ids = selection.selected.iter().map(|s| s.mask_id);
    let first = ids.next().ok_or(MaskAlgError::EmptySelection)?;
    let mut out = set.get(first).ok_or(MaskAlgError::UnknownMaskId(first))?.clone();
    for id in ids {
        out.union_with(set.get(id).ok_or(MaskAlgError::UnknownMaskId(id))?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mask_from_pixels(w: u32, h: u32, px: &[(u32, u32)]) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h).unwrap();
        for &(x, y) in px {
            m.set(x, y, true);
        }
        m
    }

    fn set_of(masks: Vec<BinaryMask>) -> SubMaskSet {
        let (w, h) = masks[0].dims();
        let subs = masks.into_iter().enumerate().map(|(i, mask)| SubMask { id: i as u32, mask }).collect();
        SubMaskSet::new("f", w, h, subs).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let roi = mask_from_pixels(4, 4, &[(0, 0), (1, 0), (2, 0), (0, 1)]);
        let inside = mask_from_pixels(4, 4, &[(0, 0), (1, 0)]);
        let disjoint = mask_from_pixels(4, 4, &[(3, 3)]);
        let partial = mask_from_pixels(4, 4, &[(0, 0), (1, 0), (2, 0), (3, 0)]);
        assert_eq!(intersection_ratio(&inside, &roi).unwrap(), 1.0);
        assert_eq!(intersection_ratio(&disjoint, &roi).unwrap(), 0.0);
        assert_eq!(intersection_ratio(&partial, &roi).unwrap(), 0.75);
    }

    #[test]
    fn ratio_errors() {
        let roi = BinaryMask::full(4, 4).unwrap();
        assert_eq!(
            intersection_ratio(&BinaryMask::empty(4, 4).unwrap(), &roi),
            Err(MaskAlgError::EmptySubMask { id: None })
        );
        assert!(matches!(
            intersection_ratio(&BinaryMask::full(4, 3).unwrap(), &roi),
            Err(MaskAlgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exact_half_is_excluded() {
        let roi = mask_from_pixels(4, 1, &[(0, 0), (1, 0)]);
        let half = BinaryMask::full(4, 1).unwrap();
        let set = set_of(vec![half]);
        let sel = select_overlapping(&set, &roi, DEFAULT_THRESHOLD).unwrap();
        assert!(sel.is_empty());
    }

    #[test]
    fn full_frame_roi_selects_everything() {
        let roi = BinaryMask::full(3, 3).unwrap();
        let set = set_of(vec![
            mask_from_pixels(3, 3, &[(0, 0)]),
            mask_from_pixels(3, 3, &[(1, 1), (2, 2)]),
            mask_from_pixels(3, 3, &[(2, 0)]),
        ]);
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        assert_eq!(sel.len(), 3);
        assert!(sel.selected.iter().all(|s| s.ratio == 1.0));
    }

    #[test]
    fn selects_only_ratios_above_half() {
        // ROI is the left 6 columns; ratios 0.4, 0.6, 1.0.
        let roi = BinaryMask::from_fn(10, 5, |x, _| x < 6).unwrap();
        let a = BinaryMask::from_fn(10, 5, |x, y| y == 0 && (4..9).contains(&x)).unwrap(); // 2/5
        let b = BinaryMask::from_fn(10, 5, |x, y| y == 1 && (3..8).contains(&x)).unwrap(); // 3/5
        let c = BinaryMask::from_fn(10, 5, |x, y| y == 2 && x < 4).unwrap(); // 4/4
        let set = set_of(vec![a, b, c]);
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        let ids: Vec<u32> = sel.selected.iter().map(|s| s.mask_id).collect();
        assert_eq!(ids, [1, 2]);
        assert!((sel.selected[0].ratio - 0.6).abs() < 1e-15);
    }

    #[test]
    fn best_single_by_area_with_low_id_tiebreak() {
        let roi = BinaryMask::full(40, 40).unwrap();
        let by_area = |n: u32, row: u32| BinaryMask::from_fn(40, 40, |x, y| y * 40 + x >= row * 40 && y * 40 + x < row * 40 + n).unwrap();
        let set = set_of(vec![by_area(120, 0), by_area(300, 5), by_area(45, 20)]);
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        assert_eq!(best_single_mask(&sel, &set).unwrap().area(), 300);

        let subs = vec![
            SubMask { id: 7, mask: by_area(50, 0) },
            SubMask { id: 3, mask: by_area(50, 10) },
        ];
        let set = SubMaskSet::new("f", 40, 40, subs).unwrap();
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        assert_eq!(best_single_mask(&sel, &set).unwrap(), set.get(3).unwrap());
    }

    #[test]
    fn combine_examples() {
        let roi = BinaryMask::full(6, 2).unwrap();
        let a = BinaryMask::from_fn(6, 2, |_, y| y == 0).unwrap();
        let b = BinaryMask::from_fn(6, 2, |x, y| y == 1 && x < 3).unwrap();
        let set = set_of(vec![a.clone(), b]);
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        assert_eq!(combine_masks(&sel, &set).unwrap().area(), 9);

        // 4-pixel mask sharing 2 pixels with `a`: 6 + 4 - 2 = 8.
        let a6 = a;
        let c_overlap = BinaryMask::from_fn(6, 2, |x, y| (y == 0 && x >= 4) || (y == 1 && x < 2)).unwrap();
        assert_eq!(c_overlap.area(), 4);
        assert_eq!(a6.intersection_area(&c_overlap).unwrap(), 2);
        let set = set_of(vec![a6.clone(), c_overlap]);
        let sel = select_overlapping(&set, &roi, 0.5).unwrap();
        assert_eq!(combine_masks(&sel, &set).unwrap().area(), 8);

        let single = set_of(vec![a6.clone()]);
        let sel = select_overlapping(&single, &roi, 0.5).unwrap();
        assert_eq!(combine_masks(&sel, &single).unwrap(), a6);
        assert_eq!(best_single_mask(&sel, &single).unwrap(), &a6);
    }

    #[test]
    fn empty_selection_errors() {
        let set = set_of(vec![BinaryMask::full(2, 2).unwrap()]);
        let sel = OverlapSelection { frame_id: "f".into(), threshold: 0.5, selected: vec![] };
        assert_eq!(best_single_mask(&sel, &set), Err(MaskAlgError::EmptySelection));
        assert_eq!(combine_masks(&sel, &set), Err(MaskAlgError::EmptySelection));
    }

    #[test]
    fn set_validation() {
        let m = BinaryMask::full(2, 2).unwrap();
        let dup = vec![SubMask { id: 1, mask: m.clone() }, SubMask { id: 1, mask: m.clone() }];
        assert_eq!(SubMaskSet::new("f", 2, 2, dup), Err(MaskAlgError::DuplicateMaskId(1)));
        let with_empty = vec![SubMask { id: 2, mask: m.clone() }, SubMask { id: 1, mask: BinaryMask::empty(2, 2).unwrap() }];
        assert!(matches!(SubMaskSet::new("f", 2, 2, with_empty.clone()), Err(MaskAlgError::EmptySubMask { id: Some(1) })));
        let (set, dropped) = SubMaskSet::filtered("f", 2, 2, with_empty).unwrap();
        assert_eq!((set.len(), dropped), (1, 1));
        let wrong = vec![SubMask { id: 0, mask: BinaryMask::full(3, 2).unwrap() }];
        assert!(matches!(SubMaskSet::new("f", 2, 2, wrong), Err(MaskAlgError::DimensionMismatch { .. })));
        assert!(matches!(
            select_overlapping(&set, &m, 1.5),
            Err(MaskAlgError::InvalidThreshold(_))
        ));
    }
}
