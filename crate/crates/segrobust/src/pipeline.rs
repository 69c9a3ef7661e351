//! Evaluation runs: corpus → (corrupted) frames → sub-masks → scored records.
//!
//! Sub-masks come either from pre-computed mask documents laid out as
//!
//! ```text
//! <masks>/clean/<stem>.masks.json              severity 0 and captured conditions
//! <masks>/<kind>/s<severity>/<stem>.masks.json synthetic corruptions
//! ```
//!
//! or from the built-in baseline segmenter run inline on frames corrupted in
//! memory with the same per-frame seeds as the `corrupt` command.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use segrobust_core::corrupt::{apply_corruption, CorruptionKind, CorruptionSpec, SeverityTable};
use segrobust_core::maskalg::{MaskAlgError, SubMaskSet};
use segrobust_core::metrics::{score_frame, EvalRecord, Mode};
use segrobust_core::raster::{BinaryMask, Image};
use segrobust_core::segment::{BaselineSegmenter, Segmenter};
use serde::Serialize;

use crate::corpus::{frame_seed, read_manifest, relative_output_path, MANIFEST_FILE};
use crate::dataset::{load_corpus, Corpus, Frame, Layout};
use crate::error::{Error, Result};
use crate::maskfile::{self, SegmenterInfo};
use crate::records::{self, REPORT_NOTES};
use crate::io;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const RUN_FILE: &str = "run.json";
pub const CLEAN_DIR: &str = "clean";
/// Kind label of unlabelled frames in condition runs.
pub const CLEAN_LABEL: &str = "clean";

#[derive(Debug, Clone, PartialEq)]
pub enum MaskSource {
    Baseline(BaselineSegmenter),
    Documents(PathBuf),
}

/// What each frame is evaluated under.
#[derive(Debug, Clone, PartialEq)]
pub enum Units {
    /// Every frame under every (kind, severity) pair.
    Corruptions { kinds: Vec<CorruptionKind>, severities: Vec<u8> },
    /// Every frame once, as captured, labelled by its `conditions.csv` entry.
    Conditions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub masks: MaskSource,
    pub units: Units,
    pub modes: Vec<Mode>,
    pub threshold: f64,
    pub seed: u64,
    /// Thread count; 0 lets the pool decide. Never affects outputs.
    pub workers: usize,
    pub table: SeverityTable,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(MaskAlgError::InvalidThreshold(self.threshold).into());
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidArgument("at least one mode is required".into()));
        }
        if let Units::Corruptions { severities, .. } = &self.units {
            if let Some(&s) = severities.iter().find(|&&s| s > 5) {
                return Err(segrobust_core::corrupt::CorruptError::InvalidSeverity(s).into());
            }
        }
        Ok(())
    }
}

/// A (frame, kind, severity) unit that produced no records.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Skip {
    pub frame: String,
    pub kind: String,
    pub severity: u8,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<EvalRecord>,
    pub skips: Vec<Skip>,
    pub segmenters: BTreeSet<(String, String)>,
    pub frames: usize,
}

/// `<masks>/clean/<stem>.masks.json` for severity 0, else
/// `<masks>/<kind>/s<severity>/<stem>.masks.json`.
pub fn mask_document_path(masks: &Path, kind: Option<CorruptionKind>, severity: u8, stem: &str) -> PathBuf {
    match kind {
        Some(kind) if severity > 0 => maskfile::document_path(&masks.join(kind.as_str()).join(format!("s{severity}")), stem),
        _ => maskfile::document_path(&masks.join(CLEAN_DIR), stem),
    }
}

/// Runs `f` on a pool with `workers` threads (0 = default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

struct UnitResult {
    records: Vec<EvalRecord>,
    skip: Option<Skip>,
    segmenter: Option<(String, String)>,
}

struct FrameData {
    image: Option<Image>,
    gt: BinaryMask,
}

fn segmenter_key(s: &dyn Segmenter) -> (String, String) {
    (s.name().to_owned(), s.version().to_owned())
}

fn evaluate_unit(
    cfg: &RunConfig,
    frame: &Frame,
    data: &FrameData,
    clean_set: Option<&SubMaskSet>,
    kind: Option<CorruptionKind>,
    label: &str,
    severity: u8,
) -> Result<UnitResult> {
    let score = |set: &SubMaskSet| -> Result<Vec<EvalRecord>> {
        score_frame(set, &data.gt, cfg.threshold, label, severity, &cfg.modes).map_err(|e| match e {
            MaskAlgError::DimensionMismatch { left, right } => {
                Error::DimensionMismatch { stem: frame.id.clone(), expected: right, found: left }
            }
            e => e.into(),
        })
    };
    match &cfg.masks {
        MaskSource::Baseline(seg) => {
            let records = match (kind, clean_set) {
                (Some(kind), _) if severity > 0 => {
                    let img = data.image.as_ref().expect("baseline runs load frames");
                    let spec = CorruptionSpec::new(kind, severity, frame_seed(cfg.seed, &frame.id))?;
                    let corrupted = apply_corruption(img, spec, &cfg.table)?;
                    score(&seg.segment(&frame.id, &corrupted)?)?
                }
                (_, Some(set)) => score(set)?,
                (_, None) => unreachable!("clean set is computed for clean units"),
            };
            Ok(UnitResult { records, skip: None, segmenter: Some(segmenter_key(seg)) })
        }
        MaskSource::Documents(root) => {
            let path = mask_document_path(root, kind, severity, &frame.id);
            match maskfile::read_masks(&path) {
                Ok(loaded) => Ok(UnitResult {
                    records: score(&loaded.set)?,
                    skip: None,
                    segmenter: Some((loaded.segmenter.name, loaded.segmenter.version)),
                }),
                Err(e @ Error::MissingMaskDocument(_)) => Ok(UnitResult {
                    records: Vec::new(),
                    skip: Some(Skip { frame: frame.id.clone(), kind: label.into(), severity, reason: e.to_string() }),
                    segmenter: None,
                }),
                Err(e) => Err(e),
            }
        }
    }
}

fn evaluate_frame(cfg: &RunConfig, frame: &Frame) -> Result<Vec<UnitResult>> {
    let needs_image = matches!(cfg.masks, MaskSource::Baseline(_));
    let (image, dims) = if needs_image {
        let img = frame.load_image()?;
        let dims = img.dims();
        (Some(img), dims)
    } else {
        (None, io::image_dims(&frame.image_path)?)
    };
    let data = FrameData { image, gt: frame.load_gt(dims)? };

    // (kind, label, severity) for every unit of this frame.
    let units: Vec<(Option<CorruptionKind>, String, u8)> = match &cfg.units {
        Units::Corruptions { kinds, severities } => kinds
            .iter()
            .flat_map(|&k| severities.iter().map(move |&s| (Some(k), k.as_str().to_owned(), s)))
            .collect(),
        Units::Conditions => {
            let (label, level) = frame
                .condition
                .as_ref()
                .map_or((CLEAN_LABEL.to_owned(), 0), |c| (c.label.clone(), c.level));
            vec![(None, label, level)]
        }
    };

    let needs_clean = units.iter().any(|(k, _, s)| k.is_none() || *s == 0);
    let clean_set = match (&cfg.masks, needs_clean) {
        (MaskSource::Baseline(seg), true) => {
            Some(seg.segment(&frame.id, data.image.as_ref().expect("loaded above"))?)
        }
        _ => None,
    };

    units
        .par_iter()
        .map(|(kind, label, severity)| evaluate_unit(cfg, frame, &data, clean_set.as_ref(), *kind, label, *severity))
        .collect()
}

/// Evaluates the whole corpus. Output ordering is canonical, so it does not
/// depend on `cfg.workers`.
pub fn evaluate(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let corpus = load_corpus(&cfg.corpus, Layout::PairedDirs)?;
    evaluate_corpus(cfg, &corpus)
}

pub fn evaluate_corpus(cfg: &RunConfig, corpus: &Corpus) -> Result<RunOutput> {
    cfg.validate()?;
    let per_frame: Vec<Vec<UnitResult>> = with_workers(cfg.workers, || {
        corpus.frames.par_iter().map(|f| evaluate_frame(cfg, f)).collect::<Result<_>>()
    })??;

    let mut out = RunOutput { records: Vec::new(), skips: Vec::new(), segmenters: BTreeSet::new(), frames: corpus.frames.len() };
    for unit in per_frame.into_iter().flatten() {
        out.records.extend(unit.records);
        out.skips.extend(unit.skip);
        out.segmenters.extend(unit.segmenter);
    }
    records::sort_records(&mut out.records);
    out.skips.sort();
    for s in &out.skips {
        log::warn!("skipped {} {} s{}: {}", s.frame, s.kind, s.severity, s.reason);
    }
    Ok(out)
}

#[derive(Serialize)]
struct SegmenterEntry<'a> {
    name: &'a str,
    version: &'a str,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    corpus: String,
    masks: String,
    segmenters: Vec<SegmenterEntry<'a>>,
    seed: u64,
    threshold: f64,
    units: &'a str,
    kinds: Vec<&'a str>,
    severities: &'a [u8],
    modes: Vec<&'a str>,
    frames: usize,
    records: usize,
    skips: &'a [Skip],
    notes: &'a [&'a str],
}

/// Stable JSON summary of a run (no timestamps, no worker count).
pub fn run_summary(cfg: &RunConfig, out: &RunOutput) -> Vec<u8> {
    let (units, kinds, severities): (&str, Vec<&str>, &[u8]) = match &cfg.units {
        Units::Corruptions { kinds, severities } => ("corruptions", kinds.iter().map(|k| k.as_str()).collect(), severities),
        Units::Conditions => ("conditions", Vec::new(), &[]),
    };
    let summary = RunSummary {
        corpus: cfg.corpus.display().to_string(),
        masks: match &cfg.masks {
            MaskSource::Baseline(_) => "baseline".into(),
            MaskSource::Documents(p) => p.display().to_string(),
        },
        segmenters: out.segmenters.iter().map(|(name, version)| SegmenterEntry { name, version }).collect(),
        seed: cfg.seed,
        threshold: cfg.threshold,
        units,
        kinds,
        severities,
        modes: cfg.modes.iter().map(|m| m.as_str()).collect(),
        frames: out.frames,
        records: out.records.len(),
        skips: &out.skips,
        notes: REPORT_NOTES,
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes `<out>/records.jsonl` and `<out>/run.json`.
pub fn write_run(out_dir: &Path, cfg: &RunConfig, out: &RunOutput) -> Result<()> {
    records::write_records(&out_dir.join(RECORDS_FILE), &out.records)?;
    io::write_bytes(&out_dir.join(RUN_FILE), &run_summary(cfg, out))
}

/// Writes baseline mask documents for the clean corpus frames and, when
/// `corrupted` holds the output of [`crate::corpus::corrupt_corpus`], for
/// every corrupted image listed in its manifest. Returns the number of
/// documents written.
pub fn segment_baseline(
    corpus_root: &Path,
    corrupted: Option<&Path>,
    masks: &Path,
    seg: &BaselineSegmenter,
    workers: usize,
) -> Result<usize> {
    let corpus = load_corpus(corpus_root, Layout::PairedDirs)?;
    let mut jobs: Vec<(String, PathBuf, PathBuf)> = corpus
        .frames
        .iter()
        .map(|f| (f.id.clone(), f.image_path.clone(), mask_document_path(masks, None, 0, &f.id)))
        .collect();
    if let Some(dir) = corrupted {
        for row in read_manifest(&dir.join(MANIFEST_FILE))? {
            let kind: CorruptionKind = row.kind.parse()?;
            let expected = relative_output_path(kind, row.severity, &row.frame);
            if row.path != expected {
                return Err(Error::InvalidArgument(format!("manifest path `{}` does not match `{expected}`", row.path)));
            }
            jobs.push((row.frame.clone(), dir.join(&row.path), mask_document_path(masks, Some(kind), row.severity, &row.frame)));
        }
    }
    let info = SegmenterInfo { name: seg.name().into(), version: seg.version().into() };
    with_workers(workers, || {
        jobs.par_iter()
            .map(|(stem, image, doc)| {
                let img = io::read_image(image)?;
                maskfile::write_masks(&seg.segment(stem, &img)?, &info, doc)
            })
            .collect::<Result<Vec<()>>>()
    })??;
    Ok(jobs.len())
}
