//! Evaluation records (JSON lines) and grouped reports (CSV / JSON).

use std::fs;
use std::path::Path;

use segrobust_core::metrics::{aggregate, EvalRecord, GroupReport};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io;

/// Caveats attached to every JSON report.
pub const REPORT_NOTES: &[&str] = &[
    "corruption kinds and severity parameters follow common-corruptions conventions and stand in for an unpublished list",
    "frames where no sub-mask passes the overlap threshold are scored with an all-zero prediction (IoU 0 unless the ground truth is empty)",
];

/// Sorts records into canonical order: frame, kind, severity, mode.
pub fn sort_records(records: &mut [EvalRecord]) {
    records.sort_by(|a, b| {
        a.frame_id
            .cmp(&b.frame_id)
            .then_with(|| a.kind.cmp(&b.kind))
            .then(a.severity.cmp(&b.severity))
            .then(a.mode.cmp(&b.mode))
    });
}

pub fn records_to_jsonl(records: &[EvalRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.push(b'\n');
    }
    out
}

pub fn write_records(path: &Path, records: &[EvalRecord]) -> Result<()> {
    io::write_bytes(path, &records_to_jsonl(records))
}

pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|source| Error::Json { path: path.to_path_buf(), line: i + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

/// Column naming of a report: synthetic corruptions, or captured conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupBy {
    #[default]
    Kind,
    Condition,
}

impl std::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kind" => Ok(GroupBy::Kind),
            "condition" => Ok(GroupBy::Condition),
            other => Err(format!("unknown grouping `{other}` (expected kind or condition)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Aggregates records, failing on an empty input.
pub fn build_report(records: &[EvalRecord], source: &Path) -> Result<GroupReport> {
    if records.is_empty() {
        return Err(Error::NoRecords(source.to_path_buf()));
    }
    Ok(aggregate(records))
}

pub fn report_csv(report: &GroupReport, group_by: GroupBy) -> Vec<u8> {
    let header = match group_by {
        GroupBy::Kind => "kind,severity,mode,mean_iou,frame_count",
        GroupBy::Condition => "condition,level,mode,mean_iou,frame_count",
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header.split(',')).expect("write to memory");
    for row in &report.rows {
        w.write_record([
            row.kind.as_str(),
            &row.severity.to_string(),
            row.mode.as_str(),
            &row.mean_iou.to_string(),
            &row.frame_count.to_string(),
        ])
        .expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    severity: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    condition: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<u8>,
    mode: &'a str,
    mean_iou: f64,
    frame_count: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: Vec<JsonRow<'a>>,
    notes: &'a [&'a str],
}

pub fn report_json(report: &GroupReport, group_by: GroupBy) -> Vec<u8> {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let by_kind = group_by == GroupBy::Kind;
            JsonRow {
                kind: by_kind.then_some(r.kind.as_str()),
                severity: by_kind.then_some(r.severity),
                condition: (!by_kind).then_some(r.kind.as_str()),
                level: (!by_kind).then_some(r.severity),
                mode: r.mode.as_str(),
                mean_iou: r.mean_iou,
                frame_count: r.frame_count,
            }
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&JsonReport { rows, notes: REPORT_NOTES }).expect("report serializes");
    out.push(b'\n');
    out
}

pub fn render_report(report: &GroupReport, group_by: GroupBy, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => report_csv(report, group_by),
        Format::Json => report_json(report, group_by),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use segrobust_core::metrics::Mode;

    fn rec(frame: &str, kind: &str, severity: u8, mode: Mode, iou: f64) -> EvalRecord {
        EvalRecord { frame_id: frame.into(), kind: kind.into(), severity, mode, iou, n_submasks: 3, n_selected: 1 }
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let records = vec![rec("a", "fog", 2, Mode::Single, 0.1 + 0.2), rec("b", "fog", 2, Mode::Combined, 1.0)];
        write_records(&path, &records).unwrap();
        assert_eq!(read_records(&path).unwrap(), records);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"frame_id":"a","kind":"fog","severity":2,"mode":"single","iou":0.30000000000000004"#));
    }

    #[test]
    fn bad_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        fs::write(&path, "\n{\"frame_id\":1}\n").unwrap();
        assert!(matches!(read_records(&path), Err(Error::Json { line: 2, .. })));
    }

    #[test]
    fn report_rows_and_headers() {
        let mut records = Vec::new();
        for kind in ["fog", "snow"] {
            for sev in [1, 2] {
                for mode in Mode::BOTH {
                    records.push(rec("a", kind, sev, mode, 0.5));
                }
            }
        }
        let report = build_report(&records, Path::new("r")).unwrap();
        assert_eq!(report.rows.len(), 8);
        let csv = String::from_utf8(report_csv(&report, GroupBy::Kind)).unwrap();
        assert_eq!(csv.lines().count(), 9);
        assert_eq!(csv.lines().next(), Some("kind,severity,mode,mean_iou,frame_count"));
        assert_eq!(csv.lines().nth(1), Some("fog,1,single,0.5,1"));
        let by_condition = String::from_utf8(report_csv(&report, GroupBy::Condition)).unwrap();
        assert_eq!(by_condition.lines().next(), Some("condition,level,mode,mean_iou,frame_count"));
    }

    #[test]
    fn single_record_and_empty_input() {
        let report = build_report(&[rec("a", "smoke", 1, Mode::Combined, 0.73)], Path::new("r")).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].mean_iou, 0.73);
        assert!(matches!(build_report(&[], Path::new("r")), Err(Error::NoRecords(_))));
    }

    #[test]
    fn json_report_uses_condition_columns() {
        let report = build_report(&[rec("a", "smoke", 1, Mode::Combined, 0.73)], Path::new("r")).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&report_json(&report, GroupBy::Condition)).unwrap();
        assert_eq!(v["rows"][0]["condition"], "smoke");
        assert_eq!(v["rows"][0]["level"], 1);
        assert!(v["rows"][0].get("kind").is_none());
        assert_eq!(v["notes"].as_array().unwrap().len(), REPORT_NOTES.len());
    }
}
