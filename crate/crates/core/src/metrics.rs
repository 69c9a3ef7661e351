//! Per-frame IoU and per-group means.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::maskalg::{best_single_mask, combine_masks, select_overlapping, MaskAlgError, SubMaskSet};
use crate::raster::{BinaryMask, RasterError};

/// `|pred & gt| / |pred | gt|`; two empty masks agree perfectly (1.0).
pub fn iou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64, RasterError> {
    let inter = pred.intersection_area(gt)?;
    let union = pred.union_area(gt)?;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Combined,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Single, Mode::Combined];

    pub const fn as_str(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Combined => "combined",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Mode::Single),
            "combined" => Ok(Mode::Combined),
            other => Err(alloc::format!("unknown mode `{other}` (expected single or combined)")),
        }
    }
}

/// One scored prediction. `kind` is a corruption name, `clean`, or a
/// real-condition label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub frame_id: String,
    pub kind: String,
    pub severity: u8,
    pub mode: Mode,
    pub iou: f64,
    pub n_submasks: u32,
    pub n_selected: u32,
}

/// Scores one frame's sub-masks against its ground truth, one record per
/// mode. An empty selection is scored as an all-zero prediction.
pub fn score_frame(
    set: &SubMaskSet,
    gt: &BinaryMask,
    threshold: f64,
    kind: &str,
    severity: u8,
    modes: &[Mode],
) -> Result<Vec<EvalRecord>, MaskAlgError> {
    let selection = select_overlapping(set, gt, threshold)?;
    let mut out = Vec::with_capacity(modes.len());
    for &mode in modes {
        let value = if selection.is_empty() {
            let (w, h) = gt.dims();
            iou(&BinaryMask::empty(w, h)?, gt)?
        } else {
            match mode {
                Mode::Single => iou(best_single_mask(&selection, set)?, gt)?,
                Mode::Combined => iou(&combine_masks(&selection, set)?, gt)?,
            }
        };
        out.push(EvalRecord {
            frame_id: set.frame_id().into(),
            kind: kind.into(),
            severity,
            mode,
            iou: value,
            n_submasks: set.len() as u32,
            n_selected: selection.len() as u32,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub kind: String,
    pub severity: u8,
    pub mode: Mode,
    pub mean_iou: f64,
    pub frame_count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub rows: Vec<GroupRow>,
}

impl GroupReport {
    pub fn get(&self, kind: &str, severity: u8, mode: Mode) -> Option<&GroupRow> {
        self.rows
            .iter()
            .find(|r| r.kind == kind && r.severity == severity && r.mode == mode)
    }
}

/// Unweighted mean IoU per `(kind, severity, mode)`, rows sorted by that key.
///
/// Records are summed in frame-id order so the result does not depend on
/// the order of `records`.
pub fn aggregate(records: &[EvalRecord]) -> GroupReport {
    let mut sorted: Vec<&EvalRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.frame_id
            .cmp(&b.frame_id)
            .then_with(|| a.kind.cmp(&b.kind))
            .then(a.severity.cmp(&b.severity))
            .then(a.mode.cmp(&b.mode))
            .then(a.iou.total_cmp(&b.iou))
    });
    let mut groups: BTreeMap<(&str, u8, Mode), (f64, u64)> = BTreeMap::new();
    for r in sorted {
        let g = groups.entry((r.kind.as_str(), r.severity, r.mode)).or_insert((0.0, 0));
        g.0 += r.iou;
        g.1 += 1;
    }
    let rows = groups
        .into_iter()
        .map(|((kind, severity, mode), (sum, n))| GroupRow {
            kind: kind.into(),
            severity,
            mode,
            mean_iou: sum / n as f64,
            frame_count: n,
        })
        .collect();
    GroupReport { rows }
}
