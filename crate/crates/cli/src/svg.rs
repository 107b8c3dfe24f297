//! Self-contained SVG line and scatter charts.
//!
//! Output depends only on the input: coordinates are printed with fixed
//! precision and nothing reads the clock or the environment.

use std::fmt::Write as _;

use laborcurve::{Error, Result, Units};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mark {
    Line,
    Points,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub mark: Mark,
    /// Units of the y values; series sharing a chart must agree.
    pub y_units: Option<Units>,
}

impl ChartSeries {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, mark: Mark::Line, y_units: None }
    }

    pub fn scatter(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, mark: Mark::Points, y_units: None }
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.y_units = Some(units);
        self
    }

    /// Line over an annual series, x in calendar years.
    pub fn from_series(label: impl Into<String>, s: &laborcurve::Series) -> Self {
        Self::line(label, s.iter().map(|(y, v)| (f64::from(y), v)).collect()).with_units(s.units())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    /// Integer year ticks on x.
    pub x_years: bool,
    /// Tick labels as percentages; stored values stay fractions.
    pub x_percent: bool,
    pub y_percent: bool,
}

impl Default for ChartStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            width: 720,
            height: 420,
            x_years: true,
            x_percent: false,
            y_percent: false,
        }
    }
}

const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

#[derive(Clone, Copy, Debug)]
struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn axis(lo: f64, hi: f64, integer: bool) -> Axis {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1e-3 } else { lo.abs() * 0.1 };
        let pad = if integer { pad.max(1.0) } else { pad };
        (lo - pad, hi + pad)
    };
    let mut step = nice_step(hi - lo, 6);
    if integer {
        step = step.max(1.0).round();
    }
    Axis { lo: (lo / step).floor() * step, hi: (hi / step).ceil() * step, step }
}

impl Axis {
    fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as i64;
        (0..=n).map(|k| self.lo + self.step * k as f64).collect()
    }

    fn decimals(&self, scale: f64) -> usize {
        let s = self.step * scale;
        if s >= 1.0 {
            0
        } else {
            (-s.log10()).ceil() as usize
        }
    }

    fn label(&self, v: f64, percent: bool) -> String {
        let scale = if percent { 100.0 } else { 1.0 };
        let d = self.decimals(scale);
        // avoid "-0"
        let x = if (v * scale).abs() < self.step * scale * 1e-9 { 0.0 } else { v * scale };
        if percent {
            format!("{x:.d$}%")
        } else {
            format!("{x:.d$}")
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `series` into an SVG document.
pub fn emit_svg_chart(series: &[ChartSeries], style: &ChartStyle) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Input("chart needs at least one series".into()));
    }
    if let Some(s) = series.iter().find(|s| s.points.is_empty()) {
        return Err(Error::Input(format!("series {:?} has no points", s.label)));
    }
    if series.iter().flat_map(|s| &s.points).any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Input("chart points must be finite".into()));
    }
    let mut units = series.iter().filter_map(|s| s.y_units);
    if let Some(first) = units.next() {
        if let Some(other) = units.find(|u| *u != first) {
            return Err(Error::UnitMismatch { left: first, right: other });
        }
    }

    let pts = || series.iter().flat_map(|s| s.points.iter().copied());
    let fold = |f: fn(&(f64, f64)) -> f64| {
        pts().map(|p| f(&p)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = fold(|p| p.0);
    let (y0, y1) = fold(|p| p.1);
    let xa = axis(x0, x1, style.x_years);
    let ya = axis(y0, y1, false);

    let (w, h) = (f64::from(style.width), f64::from(style.height));
    let pw = w - LEFT - RIGHT;
    let ph = h - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xa.lo) / (xa.hi - xa.lo) * pw;
    let sy = |y: f64| TOP + (ya.hi - y) / (ya.hi - ya.lo) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        style.width, style.height, style.width, style.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !style.title.is_empty() {
        let _ = writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(&style.title));
    }

    out.push_str("<g class=\"grid\" stroke=\"#e0e0e0\">\n");
    for t in ya.ticks() {
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, LEFT, sy(t), LEFT + pw, sy(t));
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"axes\" stroke=\"black\">\n");
    let _ = writeln!(out, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, LEFT, TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(out, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, LEFT, TOP, LEFT, TOP + ph);
    out.push_str("</g>\n");

    out.push_str("<g class=\"x-ticks\" text-anchor=\"middle\">\n");
    for t in xa.ticks() {
        let label = if style.x_years { format!("{}", t.round() as i64) } else { xa.label(t, style.x_percent) };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}">{label}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            x = sx(t)
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"y-ticks\" text-anchor=\"end\">\n");
    for t in ya.ticks() {
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT - 5.0,
            LEFT,
            LEFT - 8.0,
            sy(t) + 4.0,
            ya.label(t, style.y_percent),
            y = sy(t)
        );
    }
    out.push_str("</g>\n");

    if !style.x_label.is_empty() {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, h - 10.0, escape(&style.x_label));
    }
    if !style.y_label.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&style.y_label)
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.mark {
            Mark::Line => {
                let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    coords.join(" ")
                );
            }
            Mark::Points => {
                let _ = writeln!(out, r#"<g class="points" fill="{color}">"#);
                for &(x, y) in &s.points {
                    let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, sx(x), sy(y));
                }
                out.push_str("</g>\n");
            }
        }
    }

    out.push_str("<g class=\"legend\">\n");
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 8.0 + 16.0 * i as f64;
        let x = LEFT + 10.0;
        let _ = writeln!(
            out,
            r#"<g class="legend-entry"><rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            y - 9.0,
            x + 15.0,
            y,
            escape(&s.label)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
