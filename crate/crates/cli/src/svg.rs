//! Small dependency-free SVG charts: line, scatter and bar.

use std::fmt::Write as _;

use critdisc::format::{sig, Metadata};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

impl Series {
    pub fn new(name: &str, points: Vec<(f64, f64)>, color: usize) -> Self {
        Series {
            name: name.to_string(),
            points: points
                .into_iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect(),
            color: PALETTE[color % PALETTE.len()],
        }
    }
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Horizontal reference lines.
    pub h_rules: Vec<f64>,
    /// Vertical reference lines.
    pub v_rules: Vec<f64>,
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Chart {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            h_rules: Vec::new(),
            v_rules: Vec::new(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step - 1e-9).ceil() as i64;
    let end = (hi / step + 1e-9).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 1e-12 { lo.abs() * 0.05 } else { 0.5 };
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open(s: &mut String, chart: &Chart, meta: &Metadata, frame: &Frame) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str("<!--\n");
    for mut line in meta.lines() {
        while line.contains("--") {
            line = line.replace("--", "- -");
        }
        let _ = writeln!(s, "{line}");
    }
    s.push_str("-->\n");
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&chart.title)
    );
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for t in nice_ticks(frame.x.0, frame.x.1, 8) {
        let x = frame.px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y1 + 5.0,
            y1 + 18.0,
            sig(t, 4)
        );
    }
    for t in nice_ticks(frame.y.0, frame.y.1, 6) {
        let y = frame.py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            sig(t, 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&chart.y_label)
    );
    for &r in &chart.h_rules {
        if r > frame.y.0 && r < frame.y.1 {
            let y = frame.py(r);
            let _ = writeln!(
                s,
                r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#
            );
        }
    }
    for &r in &chart.v_rules {
        if r > frame.x.0 && r < frame.x.1 {
            let x = frame.px(r);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="gray" stroke-dasharray="4 3"/>"#
            );
        }
    }
}

fn legend(s: &mut String, names: &[(&str, &str)]) {
    if names.len() < 2 {
        return;
    }
    for (i, (name, color)) in names.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
            y - 9.0,
            x + 15.0,
            escape(name)
        );
    }
}

fn frame_for(series: &[Series], chart: &Chart, y_floor: Option<f64>) -> Frame {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(chart.h_rules.iter().copied())
        .chain(y_floor);
    Frame {
        x: bounds(xs),
        y: bounds(ys),
    }
}

pub fn line_chart(chart: &Chart, series: &[Series], meta: &Metadata) -> String {
    let frame = frame_for(series, chart, None);
    let mut s = String::new();
    open(&mut s, chart, meta, &frame);
    for ser in series {
        if ser.points.is_empty() {
            continue;
        }
        let path: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            ser.color,
            path.join(" ")
        );
    }
    legend(
        &mut s,
        &series.iter().map(|x| (x.name.as_str(), x.color)).collect::<Vec<_>>(),
    );
    s.push_str("</svg>\n");
    s
}

pub fn scatter_chart(chart: &Chart, series: &[Series], meta: &Metadata) -> String {
    let frame = frame_for(series, chart, None);
    let mut s = String::new();
    open(&mut s, chart, meta, &frame);
    for ser in series {
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.75"/>"#,
                frame.px(x),
                frame.py(y),
                ser.color
            );
        }
    }
    legend(
        &mut s,
        &series.iter().map(|x| (x.name.as_str(), x.color)).collect::<Vec<_>>(),
    );
    s.push_str("</svg>\n");
    s
}

/// Bars span `[lo, hi)` on the x axis.
pub fn bar_chart(chart: &Chart, bars: &[(f64, f64, f64)], meta: &Metadata) -> String {
    let pts: Vec<(f64, f64)> = bars.iter().flat_map(|&(lo, hi, h)| [(lo, h), (hi, h)]).collect();
    let series = [Series::new("", pts, 0)];
    let frame = frame_for(&series, chart, Some(0.0));
    let mut s = String::new();
    open(&mut s, chart, meta, &frame);
    let base = frame.py(0.0);
    for &(lo, hi, h) in bars {
        let (x0, x1, top) = (frame.px(lo), frame.px(hi), frame.py(h));
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
            (x1 - x0).max(0.0),
            (base - top).max(0.0),
            PALETTE[0]
        );
    }
    s.push_str("</svg>\n");
    s
}
