use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use segrobust::core::corrupt::{CorruptionKind, SeverityTable};
use segrobust::core::metrics::Mode;
use segrobust::core::segment::BaselineSegmenter;
use segrobust::corpus::{corrupt_corpus, read_manifest, CorruptOptions, MANIFEST_FILE};
use segrobust::pipeline::{self, MaskSource, RunConfig, Units};
use segrobust::synth::{write_tool_corpus, SynthOptions};
use sha2::{Digest, Sha256};

fn small_corpus(root: &Path, frames: u32) {
    write_tool_corpus(root, &SynthOptions { frames, size: 64, seed: 3 }).unwrap();
}

fn options(kinds: Vec<CorruptionKind>, severities: Vec<u8>, seed: u64) -> CorruptOptions {
    CorruptOptions { kinds, severities, seed, table: SeverityTable::default() }
}

fn files_under(dir: &Path) -> BTreeSet<String> {
    walkdir(dir)
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .map(|p| p.strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/"))
        .collect()
}

fn walkdir(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                out.extend(walkdir(&p));
            } else {
                out.push(p);
            }
        }
    }
    out
}

#[test]
fn two_frames_two_kinds_two_severities() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    small_corpus(&corpus, 2);
    let out = dir.path().join("out");
    let kinds = vec![CorruptionKind::Fog, CorruptionKind::GaussianNoise];
    let rows = corrupt_corpus(&corpus, &out, &options(kinds, vec![1, 3], 11)).unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(files_under(&out).len(), 8);
    assert!(out.join("fog/s3/frame_001.png").is_file());

    let manifest = fs::read_to_string(out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(manifest.lines().next(), Some("frame,kind,severity,seed,path,sha256"));
    assert_eq!(manifest.lines().count(), 9);
    let parsed = read_manifest(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(parsed, rows);
    // Sorted by frame, kind, severity; hashes describe the files on disk.
    let keys: Vec<_> = parsed.iter().map(|r| (r.frame.clone(), r.kind.clone(), r.severity)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in &parsed {
        let bytes = fs::read(out.join(&r.path)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), r.sha256);
    }
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    small_corpus(&corpus, 3);
    let opts = options(CorruptionKind::ALL.to_vec(), vec![2, 5], 99);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    corrupt_corpus(&corpus, &a, &opts).unwrap();
    pipeline::with_workers(1, || corrupt_corpus(&corpus, &b, &opts)).unwrap().unwrap();
    assert_eq!(fs::read(a.join(MANIFEST_FILE)).unwrap(), fs::read(b.join(MANIFEST_FILE)).unwrap());
    for rel in files_under(&a) {
        assert_eq!(fs::read(a.join(&rel)).unwrap(), fs::read(b.join(&rel)).unwrap(), "{rel}");
    }
    // A different seed changes stochastic kinds.
    let c = dir.path().join("c");
    corrupt_corpus(&corpus, &c, &options(vec![CorruptionKind::ShotNoise], vec![2], 100)).unwrap();
    assert_ne!(fs::read(a.join("shot_noise/s2/frame_000.png")).unwrap(), fs::read(c.join("shot_noise/s2/frame_000.png")).unwrap());
}

#[test]
fn empty_kind_set_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    small_corpus(&corpus, 2);
    let out = dir.path().join("out");
    let rows = corrupt_corpus(&corpus, &out, &options(vec![], vec![1, 2, 3], 0)).unwrap();
    assert!(rows.is_empty());
    assert_eq!(fs::read_to_string(out.join(MANIFEST_FILE)).unwrap(), "frame,kind,severity,seed,path,sha256\n");
    assert!(files_under(&out).is_empty());
}

fn run_config(corpus: &Path, masks: MaskSource, kinds: Vec<CorruptionKind>, severities: Vec<u8>) -> RunConfig {
    RunConfig {
        corpus: corpus.to_path_buf(),
        masks,
        units: Units::Corruptions { kinds, severities },
        modes: Mode::BOTH.to_vec(),
        threshold: 0.5,
        seed: 5,
        workers: 2,
        table: SeverityTable::default(),
    }
}

#[test]
fn stored_documents_reproduce_inline_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    small_corpus(&corpus, 3);
    let kinds = vec![CorruptionKind::Snow, CorruptionKind::JpegCompression];
    let seg = BaselineSegmenter { seed: 5, ..BaselineSegmenter::default() };

    let corrupted = dir.path().join("corrupted");
    corrupt_corpus(&corpus, &corrupted, &options(kinds.clone(), vec![1, 4], 5)).unwrap();
    let masks = dir.path().join("masks");
    let written = pipeline::segment_baseline(&corpus, Some(&corrupted), &masks, &seg, 2).unwrap();
    assert_eq!(written, 3 + 3 * 2 * 2);

    let severities = vec![0, 1, 4];
    let inline = pipeline::evaluate(&run_config(&corpus, MaskSource::Baseline(seg), kinds.clone(), severities.clone())).unwrap();
    let stored = pipeline::evaluate(&run_config(&corpus, MaskSource::Documents(masks), kinds, severities)).unwrap();
    assert!(stored.skips.is_empty());
    assert_eq!(inline.records.len(), 3 * 2 * 3 * 2);
    assert_eq!(inline.records, stored.records);
    assert_eq!(inline.segmenters, stored.segmenters);
}

#[test]
fn missing_documents_are_skipped_and_itemized() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    small_corpus(&corpus, 2);
    let masks = dir.path().join("masks");
    pipeline::segment_baseline(&corpus, None, &masks, &BaselineSegmenter::default(), 1).unwrap();
    fs::remove_file(masks.join("clean/frame_001.masks.json")).unwrap();

    let cfg = run_config(&corpus, MaskSource::Documents(masks), vec![CorruptionKind::Fog], vec![0, 2]);
    let out = pipeline::evaluate(&cfg).unwrap();
    // 2 frames x 2 severities x 2 modes, minus the units without documents.
    assert_eq!(out.skips.len(), 3);
    assert_eq!(out.records.len(), 2 * 2 * 2 - 3 * 2);
    assert_eq!((out.skips[0].frame.as_str(), out.skips[0].severity), ("frame_000", 2));
    let summary: serde_json::Value = serde_json::from_slice(&pipeline::run_summary(&cfg, &out)).unwrap();
    assert_eq!(summary["skips"].as_array().unwrap().len(), 3);
    assert_eq!(summary["records"], 2);
}
