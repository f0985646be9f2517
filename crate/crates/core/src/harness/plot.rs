//! Coefficient plot of OLS and 2SLS estimates with their confidence sets.

use std::fmt::Write as _;

use crate::float::to_text;
use crate::inference::{IntervalSet, SetKind};

use super::report::DiagnosticsReport;

/// Layout constants in SVG user units.
pub mod style {
    pub const WIDTH: f64 = 720.0;
    /// Width of the label column on the left.
    pub const LABEL_WIDTH: f64 = 170.0;
    pub const RIGHT: f64 = 30.0;
    pub const TOP: f64 = 44.0;
    pub const BOTTOM: f64 = 46.0;
    pub const ROW_HEIGHT: f64 = 26.0;
    pub const GROUP_GAP: f64 = 14.0;
    pub const MARKER_RADIUS: f64 = 4.0;
    pub const ARROW: f64 = 8.0;
    pub const TICK: f64 = 5.0;
    /// Share of the data range added on each side of the axis.
    pub const PAD: f64 = 0.08;
    /// Intervals longer than this multiple of the median length do not
    /// set the axis.
    pub const MAX_LENGTH_RATIO: f64 = 20.0;
    pub const FONT: &str = "Helvetica, Arial, sans-serif";
    pub const FONT_SIZE: f64 = 12.0;
    pub const INK: &str = "#222";
    pub const OLS_COLOR: &str = "#7a7a7a";
    pub const IV_COLOR: &str = "#1f5fa8";
    pub const LTZ_COLOR: &str = "#a8431f";
    pub const GRID: &str = "#d8d8d8";
}

/// One plotted estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    /// "OLS", "2SLS" or "LTZ".
    pub group: &'static str,
    pub method: String,
    pub point: Option<f64>,
    pub set: Option<IntervalSet>,
}

impl PlotRow {
    pub fn id(&self) -> String {
        format!("{}-{}", self.group.to_ascii_lowercase(), self.method)
    }
}

/// Rows in drawing order: OLS, then every requested method, then LTZ.
/// A failed method keeps its row with no estimate.
pub fn plot_rows(report: &DiagnosticsReport) -> Vec<PlotRow> {
    let mut rows = Vec::new();
    let ols = report.ols.ok();
    rows.push(PlotRow {
        group: "OLS",
        method: "ols".into(),
        point: ols.map(|f| f.coef[0]),
        set: ols.map(|f| IntervalSet::bounded(f.ci_low[0], f.ci_high[0])),
    });
    for e in &report.inference {
        let r = e.result.ok();
        rows.push(PlotRow {
            group: "2SLS",
            method: e.method.as_str().into(),
            point: r.map(|r| r.point),
            set: r.map(|r| r.ci.clone()),
        });
    }
    if let Some(ltz) = &report.ltz {
        let r = ltz.ok();
        rows.push(PlotRow {
            group: "LTZ",
            method: "ltz".into(),
            point: r.map(|r| r.point),
            set: r.map(|r| r.ci.clone()),
        });
    }
    rows
}

/// The plotted numbers, one line per interval piece.
pub fn plot_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("group,method,point,low,high,kind\n");
    for r in rows {
        let point = r.point.map(to_text).unwrap_or_default();
        match &r.set {
            None => {
                let _ = writeln!(out, "{},{},{},,,failed", r.group, r.method, point);
            }
            Some(s) if s.intervals.is_empty() => {
                let _ = writeln!(out, "{},{},{},,,{}", r.group, r.method, point, s.kind.as_str());
            }
            Some(s) => {
                for iv in &s.intervals {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.group,
                        r.method,
                        point,
                        to_text(iv.low),
                        to_text(iv.high),
                        s.kind.as_str()
                    );
                }
            }
        }
    }
    out
}

/// Axis limits from the points and the finite interval ends. Intervals far
/// longer than the typical one are left out so they do not flatten the
/// rest; their ends are drawn clipped.
fn axis_range(rows: &[PlotRow]) -> (f64, f64) {
    let mut lengths: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.set.as_ref())
        .flat_map(|s| s.intervals.iter())
        .map(|iv| iv.high - iv.low)
        .filter(|l| l.is_finite())
        .collect();
    lengths.sort_by(f64::total_cmp);
    let cap = lengths
        .get(lengths.len() / 2)
        .map(|m| style::MAX_LENGTH_RATIO * m.max(f64::MIN_POSITIVE))
        .unwrap_or(f64::INFINITY);
    let mut vals: Vec<f64> = vec![0.0];
    for r in rows {
        vals.extend(r.point.filter(|v| v.is_finite()));
        if let Some(s) = &r.set {
            for iv in s.intervals.iter().filter(|iv| iv.high - iv.low <= cap) {
                vals.extend([iv.low, iv.high].into_iter().filter(|v| v.is_finite()));
            }
        }
    }
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    (lo - style::PAD * span, hi + style::PAD * span)
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    let nice = if m < 1.5 {
        1.0
    } else if m < 3.5 {
        2.0
    } else if m < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn color(group: &str) -> &'static str {
    match group {
        "OLS" => style::OLS_COLOR,
        "LTZ" => style::LTZ_COLOR,
        _ => style::IV_COLOR,
    }
}

fn arrow(out: &mut String, x: f64, y: f64, left: bool, id: &str, fill: &str) {
    let a = style::ARROW;
    let (tip, base) = if left { (x, x + a) } else { (x, x - a) };
    let _ = writeln!(
        out,
        r#"  <path class="arrow" data-row="{id}" data-side="{}" d="M{tip:.2},{y:.2} L{base:.2},{:.2} L{base:.2},{:.2} Z" fill="{fill}"/>"#,
        if left { "left" } else { "right" },
        y - a / 2.0,
        y + a / 2.0
    );
}

/// A finite end beyond the axis: a short bar across the segment.
fn clip_mark(out: &mut String, x: f64, y: f64, id: &str, stroke: &str) {
    let h = style::ARROW / 2.0;
    let _ = writeln!(
        out,
        r#"  <line class="clip" data-row="{id}" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="2"/>"#,
        y - h,
        y + h
    );
}

pub fn render_svg(report: &DiagnosticsReport) -> String {
    let rows = plot_rows(report);
    let (lo, hi) = axis_range(&rows);
    let x0 = style::LABEL_WIDTH;
    let x1 = style::WIDTH - style::RIGHT;
    let map = |v: f64| x0 + (v - lo) / (hi - lo) * (x1 - x0);

    let mut ys = Vec::with_capacity(rows.len());
    let mut y = style::TOP + style::ROW_HEIGHT / 2.0;
    for (i, r) in rows.iter().enumerate() {
        if i > 0 && rows[i - 1].group != r.group {
            y += style::GROUP_GAP;
        }
        ys.push(y);
        y += style::ROW_HEIGHT;
    }
    let plot_bottom = y - style::ROW_HEIGHT / 2.0;
    let height = plot_bottom + style::BOTTOM;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height:.0}" viewBox="0 0 {w} {height:.0}" font-family="{f}" font-size="{fs}">"#,
        w = style::WIDTH,
        f = style::FONT,
        fs = style::FONT_SIZE
    );
    let _ = writeln!(
        out,
        r#"  <text class="title" x="{x0}" y="{:.2}" fill="{}">{}</text>"#,
        style::TOP / 2.0,
        style::INK,
        escape(&report.study)
    );

    let step = tick_step(hi - lo);
    for i in (lo / step).ceil() as i64..=(hi / step).floor() as i64 {
        let t = i as f64 * step;
        let x = map(t);
        let _ = writeln!(
            out,
            r#"  <line class="grid" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{plot_bottom:.2}" stroke="{}"/>"#,
            style::TOP,
            style::GRID
        );
        let _ = writeln!(
            out,
            r#"  <text class="tick" x="{x:.2}" y="{:.2}" text-anchor="middle" fill="{}">{}</text>"#,
            plot_bottom + style::TICK + style::FONT_SIZE,
            style::INK,
            fmt_tick(t, step)
        );
    }
    let zx = map(0.0);
    let _ = writeln!(
        out,
        r#"  <line class="zero" x1="{zx:.2}" y1="{:.2}" x2="{zx:.2}" y2="{plot_bottom:.2}" stroke="{}" stroke-dasharray="4,3"/>"#,
        style::TOP,
        style::INK
    );
    let _ = writeln!(
        out,
        r#"  <line class="axis" x1="{x0:.2}" y1="{plot_bottom:.2}" x2="{x1:.2}" y2="{plot_bottom:.2}" stroke="{}"/>"#,
        style::INK
    );

    for (r, &y) in rows.iter().zip(&ys) {
        let id = r.id();
        let c = color(r.group);
        let kind = r.set.as_ref().map(|s| s.kind.as_str()).unwrap_or("failed");
        let _ = writeln!(
            out,
            r#"  <g class="row" data-row="{id}" data-group="{}" data-method="{}" data-kind="{kind}">"#,
            r.group,
            escape(&r.method)
        );
        let _ = writeln!(
            out,
            r#"  <text class="label" x="{:.2}" y="{:.2}" text-anchor="end" fill="{}">{} {}</text>"#,
            x0 - 10.0,
            y + style::FONT_SIZE / 3.0,
            style::INK,
            r.group,
            escape(&r.method)
        );
        match &r.set {
            None => {
                let _ = writeln!(
                    out,
                    r#"  <text class="note" x="{:.2}" y="{:.2}" fill="{}">not available</text>"#,
                    x0 + 6.0,
                    y + style::FONT_SIZE / 3.0,
                    style::INK
                );
            }
            Some(s) if s.kind == SetKind::Empty => {
                let _ = writeln!(
                    out,
                    r#"  <text class="note" x="{:.2}" y="{:.2}" fill="{}">empty set</text>"#,
                    x0 + 6.0,
                    y + style::FONT_SIZE / 3.0,
                    style::INK
                );
            }
            Some(s) => {
                for iv in &s.intervals {
                    if iv.high < lo || iv.low > hi {
                        continue;
                    }
                    let a = map(iv.low.max(lo));
                    let b = map(iv.high.min(hi));
                    let _ = writeln!(
                        out,
                        r#"  <line class="ci" data-row="{id}" x1="{a:.2}" y1="{y:.2}" x2="{b:.2}" y2="{y:.2}" stroke="{c}" stroke-width="2"/>"#
                    );
                    if iv.low == f64::NEG_INFINITY {
                        arrow(&mut out, x0, y, true, &id, c);
                    } else if iv.low < lo {
                        clip_mark(&mut out, x0, y, &id, c);
                    }
                    if iv.high == f64::INFINITY {
                        arrow(&mut out, x1, y, false, &id, c);
                    } else if iv.high > hi {
                        clip_mark(&mut out, x1, y, &id, c);
                    }
                }
            }
        }
        if let Some(p) = r.point.filter(|p| p.is_finite()) {
            let _ = writeln!(
                out,
                r#"  <circle class="point" data-row="{id}" cx="{:.2}" cy="{y:.2}" r="{}" fill="{c}"/>"#,
                map(p),
                style::MARKER_RADIUS
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
