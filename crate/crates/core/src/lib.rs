//! Allocation-only core of the `segrobust` harness.
//!
//! Everything in this crate is a pure function over in-memory rasters, so it
//! builds under `#![no_std]` with `alloc`. File formats, directory walking and
//! the command line live in the `segrobust` crate.
//!
//! - [`raster`]: RGB images, bit-packed binary masks and the row-major RLE codec.
//! - [`corrupt`]: eighteen seeded image corruptions at severities 0..=5.
//! - [`maskalg`]: intersection-ratio filtering of sub-masks against a ground-truth
//!   region, best-single selection and combined (union) prediction.
//! - [`metrics`]: IoU and per-group aggregation of evaluation records.
//! - [`segment`]: the segmenter contract and a SLIC-style baseline over-segmenter.
#![no_std]

extern crate alloc;

pub mod corrupt;
pub mod maskalg;
pub mod metrics;
pub mod raster;
pub mod segment;

pub use corrupt::{apply_corruption, distortion_psnr, CorruptionKind, CorruptionSpec, SeverityTable};
pub use maskalg::{
    best_single_mask, combine_masks, intersection_ratio, select_overlapping, OverlapSelection, SubMask,
    SubMaskSet,
};
pub use metrics::{aggregate, iou, score_frame, EvalRecord, GroupReport, GroupRow, Mode};
pub use raster::{mask_area, rle_decode, rle_encode, BinaryMask, Image, RleMask};
pub use segment::{baseline_oversegment, BaselineSegmenter, Segmenter};
