//! Output formats: a versioned JSON fold document that round-trips into a
//! [`FoldState`], a midpoint OBJ mesh, the cross-section CSV and SVG plots.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::FitReport;
use crate::foldctor::{parse_angle, Diagnostics, FoldState, MvViolation, Numerics};
use crate::geom3::IPoint3;
use crate::ivalnum::Interval;
use crate::pattern::{CornerId, CreaseKind, CreasePattern, MvSign, TriangulationKind};

pub const FOLD_FORMAT: &str = "hypar-fold";
pub const FOLD_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("not a {FOLD_FORMAT} document (format {0:?}, version {1})")]
    Format(String, u32),
    #[error("document inconsistent with its pattern: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Parameters that produced a document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub n: u32,
    /// Exact angle in degrees, as `p` or `p/q`.
    pub theta_deg: String,
    pub kind: TriangulationKind,
    pub digits: u32,
    pub numerics: Numerics,
    pub library_version: String,
}

impl Header {
    pub fn of(state: &FoldState) -> Header {
        Header {
            n: state.rings(),
            theta_deg: state.theta_deg.to_string(),
            kind: state.kind(),
            digits: state.digits,
            numerics: state.numerics,
            library_version: crate::VERSION.to_string(),
        }
    }

    /// `key=value` lines for formats with comment headers.
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("n={}", self.n),
            format!("theta_deg={}", self.theta_deg),
            format!("kind={}", self.kind.short_name()),
            format!("digits={}", self.digits),
            format!("numerics={:?}/{:?}", self.numerics.method, self.numerics.order),
            format!("version={}", self.library_version),
        ]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexPosition {
    pub id: String,
    pub position: IPoint3,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldedCrease {
    pub kind: CreaseKind,
    pub a: String,
    pub b: String,
    pub mv: MvSign,
    /// Certified realized sign, absent on the boundary.
    pub sign: Option<i32>,
    pub fold_angle_deg: Option<Interval>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FoldDocument {
    pub format: String,
    pub version: u32,
    pub header: Header,
    pub vertices: Vec<VertexPosition>,
    pub creases: Vec<FoldedCrease>,
    pub faces: Vec<[String; 3]>,
    pub mv_violations: Vec<MvViolation>,
}

pub fn fold_document(state: &FoldState) -> FoldDocument {
    let angles = state.fold_angles().unwrap_or_else(|_| vec![None; state.pattern.creases.len()]);
    FoldDocument {
        format: FOLD_FORMAT.into(),
        version: FOLD_FORMAT_VERSION,
        header: Header::of(state),
        vertices: state
            .pattern
            .vertices()
            .map(|v| VertexPosition { id: v.to_string(), position: state.pos(v).clone() })
            .collect(),
        creases: state
            .pattern
            .creases
            .iter()
            .zip(&state.signs)
            .zip(angles)
            .map(|((c, s), angle)| FoldedCrease {
                kind: c.kind,
                a: c.endpoints.0.to_string(),
                b: c.endpoints.1.to_string(),
                mv: c.mv,
                sign: *s,
                fold_angle_deg: angle,
            })
            .collect(),
        faces: state.pattern.faces.iter().map(|f| f.map(|v| v.to_string())).collect(),
        mv_violations: state.diagnostics.mv_violations.clone(),
    }
}

pub fn fold_json(state: &FoldState) -> String {
    serde_json::to_string_pretty(&fold_document(state)).expect("fold documents serialize")
}

/// Rebuilds a state from a document. Positions and signs are taken as
/// stored; the pattern is regenerated from the header and must agree.
pub fn state_from_document(doc: &FoldDocument) -> Result<FoldState, ExportError> {
    if doc.format != FOLD_FORMAT || doc.version != FOLD_FORMAT_VERSION {
        return Err(ExportError::Format(doc.format.clone(), doc.version));
    }
    let h = &doc.header;
    if h.n == 0 {
        return Err(ExportError::Inconsistent("n must be at least 1".into()));
    }
    let theta_deg = parse_angle(&h.theta_deg).map_err(ExportError::Inconsistent)?;
    let pattern = CreasePattern::build(h.n, h.kind);
    let ids: Vec<CornerId> = pattern.vertices().collect();
    if doc.vertices.len() != ids.len() || doc.creases.len() != pattern.creases.len() {
        return Err(ExportError::Inconsistent("vertex or crease count".into()));
    }
    for (v, rec) in ids.iter().zip(&doc.vertices) {
        if rec.id != v.to_string() {
            return Err(ExportError::Inconsistent(format!("vertex {} where {v} was expected", rec.id)));
        }
    }
    for (c, rec) in pattern.creases.iter().zip(&doc.creases) {
        if rec.a != c.endpoints.0.to_string() || rec.b != c.endpoints.1.to_string() || rec.kind != c.kind {
            return Err(ExportError::Inconsistent(format!("crease {}-{}", rec.a, rec.b)));
        }
    }
    let signs: Vec<Option<i32>> = doc.creases.iter().map(|c| c.sign).collect();
    let mv_violations = pattern
        .creases
        .iter()
        .zip(&signs)
        .enumerate()
        .filter_map(|(i, (c, s))| match (c.mv.value(), s) {
            (Some(want), Some(got)) if want != *got => {
                Some(MvViolation { crease: i, kind: c.kind, expected: want, realized: *got })
            }
            _ => None,
        })
        .collect();
    Ok(FoldState {
        pattern,
        theta_deg,
        digits: h.digits,
        numerics: h.numerics,
        positions: doc.vertices.iter().map(|v| v.position.clone()).collect(),
        signs,
        diagnostics: Diagnostics { mv_violations },
    })
}

pub fn state_from_json(text: &str) -> Result<FoldState, ExportError> {
    state_from_document(&serde_json::from_str(text)?)
}

/// Wavefront OBJ of the interval midpoints.
pub fn obj_mesh(state: &FoldState) -> String {
    let mut out = String::new();
    for line in Header::of(state).lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "# vertex coordinates are interval midpoints");
    for v in state.pattern.vertices() {
        let [x, y, z] = state.pos(v).mid_f64();
        let _ = writeln!(out, "v {x} {y} {z}");
    }
    for f in &state.pattern.faces {
        let [a, b, c] = f.map(|v| v.index() + 1);
        let _ = writeln!(out, "f {a} {b} {c}");
    }
    out
}

pub const CSV_COLUMNS: [&str; 7] = ["k", "u", "z", "class", "fit", "abs_dev", "rel_dev"];

/// Cross-section table, one row per corner, preceded by `#` header lines.
pub fn deviation_csv(report: &FitReport, header: &[String]) -> String {
    let mut out = Vec::new();
    for line in header {
        out.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(CSV_COLUMNS).expect("in-memory write");
        for r in &report.rows {
            let rel = r.rel_dev.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.k.to_string(),
                r.u.to_string(),
                r.z.to_string(),
                r.parity.name().to_string(),
                r.fit.to_string(),
                r.abs_dev.to_string(),
                rel,
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(out).expect("ascii output")
}

/// One polyline of an SVG plot.
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
    /// Draw markers only, no connecting line.
    pub markers: bool,
}

/// Minimal SVG line plot with axes, bounds and a legend.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 56.0;
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.0), b.max(p.0), c.min(p.1), d.max(p.1)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * M, H - 2.0 * M);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 16.0, escape(x_label));
    let _ = writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, H / 2.0, H / 2.0, escape(y_label));
    for (v, x, y, anchor) in [(x0, sx(x0), H - M + 16.0, "start"), (x1, sx(x1), H - M + 16.0, "end")] {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#, tick(v));
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, M - 4.0, y + 4.0, tick(v));
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(s, r##"<line x1="{M}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##, W - M, sy(0.0), sy(0.0));
    }
    for (i, ser) in series.iter().enumerate() {
        let pts: Vec<String> =
            ser.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        if ser.markers {
            for p in &pts {
                let (x, y) = p.split_once(',').expect("formatted pair");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{}"/>"#, ser.color);
            }
        } else {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#, ser.color, pts.join(" "));
        }
        let ly = M + 16.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="12" height="3" fill="{}"/>"#, M + 10.0, ly - 4.0, ser.color);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, M + 28.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The section with both class fits drawn over their own `u` ranges.
pub fn cross_section_svg(report: &FitReport, title: &str) -> String {
    let actual = report.rows.iter().map(|r| (r.u, r.z)).collect();
    let mut series = vec![Series { label: "actual".into(), color: "black", points: actual, markers: false }];
    for (fit, color) in report.fits.iter().zip(["#c0392b", "#2471a3"]) {
        let us: Vec<f64> = report.rows.iter().filter(|r| r.parity == fit.parity).map(|r| r.u).collect();
        let hi = us.iter().copied().fold(0.0, f64::max);
        let points = (0..=100).map(|i| hi * i as f64 / 100.0).map(|u| (u, fit.eval(u))).collect();
        series.push(Series { label: format!("{} fit", fit.parity.name()), color, points, markers: false });
    }
    svg_plot(title, "u", "z", &series)
}

/// Absolute or relative deviation against `k`, one marker series per class.
pub fn deviation_svg(report: &FitReport, relative: bool, title: &str) -> String {
    let series: Vec<Series> = report
        .fits
        .iter()
        .zip(["#c0392b", "#2471a3"])
        .map(|(fit, color)| Series {
            label: fit.parity.name().into(),
            color,
            markers: true,
            points: report
                .rows
                .iter()
                .filter(|r| r.parity == fit.parity)
                .filter_map(|r| {
                    let y = if relative { r.rel_dev? } else { r.abs_dev };
                    Some((r.k as f64, y))
                })
                .collect(),
        })
        .collect();
    let y = if relative { "fit / actual" } else { "fit − actual" };
    svg_plot(title, "k", y, &series)
}
