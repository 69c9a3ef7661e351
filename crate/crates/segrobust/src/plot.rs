//! Minimal SVG line charts: mean IoU against severity, one polyline per mode.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use segrobust_core::metrics::{GroupReport, Mode};

use crate::error::Result;
use crate::io;

const WIDTH: f64 = 360.0;
const HEIGHT: f64 = 260.0;
const LEFT: f64 = 50.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 40.0;
const MAX_LEVEL: f64 = 5.0;

fn color(mode: Mode) -> &'static str {
    match mode {
        Mode::Single => "#d62728",
        Mode::Combined => "#1f77b4",
    }
}

fn px(level: u8) -> f64 {
    LEFT + f64::from(level) / MAX_LEVEL * (WIDTH - LEFT - RIGHT)
}

fn py(iou: f64) -> f64 {
    HEIGHT - BOTTOM - iou.clamp(0.0, 1.0) * (HEIGHT - TOP - BOTTOM)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn file_name(kind: &str) -> String {
    let safe: String =
        kind.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect();
    format!("{safe}.svg")
}

/// Chart for one kind; severities outside 0..=5 are ignored.
pub fn render_kind_svg(report: &GroupReport, kind: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#, WIDTH / 2.0, escape(kind));
    // Axes, ticks and labels.
    let (x0, x1, y0, y1) = (px(0), px(5), py(0.0), py(1.0));
    let _ = writeln!(s, r#"<path d="M{x0:.1} {y1:.1} V{y0:.1} H{x1:.1}" fill="none" stroke="black"/>"#);
    for level in 0..=5u8 {
        let x = px(level);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, y0 + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{level}</text>"#, y0 + 16.0);
    }
    for tick in 0..=5 {
        let v = f64::from(tick) / 5.0;
        let y = py(v);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, x0 - 7.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">severity</text>"#, (x0 + x1) / 2.0, HEIGHT - 6.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">mean IoU</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (i, mode) in Mode::BOTH.into_iter().enumerate() {
        let points: BTreeMap<u8, f64> = report
            .rows
            .iter()
            .filter(|r| r.kind == kind && r.mode == mode && r.severity <= 5)
            .map(|r| (r.severity, r.mean_iou))
            .collect();
        if !points.is_empty() {
            let coords: Vec<String> =
                points.iter().map(|(&l, &v)| format!("{:.1},{:.1}", px(l), py(v))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                coords.join(" "),
                color(mode)
            );
            for (&l, &v) in &points {
                let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{}"/>"#, px(l), py(v), color(mode));
            }
        }
        let ly = TOP + 4.0 + 14.0 * i as f64;
        let lx = x1 - 70.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/>"#,
            lx + 16.0,
            color(mode)
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{mode}</text>"#, lx + 20.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<dir>/<kind>.svg` for every kind in the report; returns the kinds.
pub fn write_kind_svgs(report: &GroupReport, dir: &Path) -> Result<Vec<String>> {
    let mut kinds: Vec<String> = report.rows.iter().map(|r| r.kind.clone()).collect();
    kinds.dedup();
    for kind in &kinds {
        io::write_bytes(&dir.join(file_name(kind)), render_kind_svg(report, kind).as_bytes())?;
    }
    Ok(kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use segrobust_core::metrics::GroupRow;

    fn report() -> GroupReport {
        let mut rows = Vec::new();
        for severity in 0..=5u8 {
            for mode in Mode::BOTH {
                let bonus = if mode == Mode::Combined { 0.05 } else { 0.0 };
                rows.push(GroupRow { kind: "fog".into(), severity, mode, mean_iou: 0.9 - 0.1 * f64::from(severity) + bonus, frame_count: 4 });
            }
        }
        GroupReport { rows }
    }

    #[test]
    fn chart_has_two_six_point_polylines() {
        let svg = render_kind_svg(&report(), "fog");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        let polylines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(polylines.len(), 2);
        for line in polylines {
            let points = line.split('"').nth(1).unwrap();
            assert_eq!(points.split(' ').count(), 6);
        }
        // Severity 0 of the single curve: x = LEFT, y for IoU 0.9.
        assert!(svg.contains(&format!("{:.1},{:.1}", LEFT, py(0.9))));
    }

    #[test]
    fn output_is_stable() {
        assert_eq!(render_kind_svg(&report(), "fog"), render_kind_svg(&report(), "fog"));
    }

    #[test]
    fn writes_one_file_per_kind() {
        let dir = tempfile::tempdir().unwrap();
        let kinds = write_kind_svgs(&report(), dir.path()).unwrap();
        assert_eq!(kinds, ["fog"]);
        assert!(dir.path().join("fog.svg").is_file());
    }
}
