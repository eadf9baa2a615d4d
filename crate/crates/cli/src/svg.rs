//! Minimal standalone SVG line plots and heatmaps.

use std::fmt::Write as _;

use crate::output::Meta;

const W: f64 = 720.0;
const H: f64 = 440.0;
const ML: f64 = 80.0;
const MR: f64 = 170.0;
const MT: f64 = 40.0;
const MB: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Text lines drawn under the legend and repeated in the caption.
    pub notes: Vec<String>,
}

/// Round tick positions covering [lo, hi].
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.3e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if lo == hi {
        let d = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        return Some((lo - d, hi + d));
    }
    Some((lo, hi))
}

fn header(meta: &Meta, title: &str, caption: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- {} -->", escape(&meta.line()));
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, "<desc>{}</desc>", escape(caption));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        ML + (W - ML - MR) / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, xr: (f64, f64), yr: (f64, f64), x_label: &str, y_label: &str) {
    let (pw, ph) = (W - ML - MR, H - MT - MB);
    let _ = writeln!(s, r##"<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##);
    for t in ticks(xr.0, xr.1) {
        let x = ML + (t - xr.0) / (xr.1 - xr.0) * pw;
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#000"/>"##, MT + ph, MT + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, MT + ph + 18.0, tick_label(t));
    }
    for t in ticks(yr.0, yr.1) {
        let y = MT + ph - (t - yr.0) / (yr.1 - yr.0) * ph;
        let _ = writeln!(s, r##"<line x1="{}" y1="{y:.2}" x2="{ML}" y2="{y:.2}" stroke="#000"/>"##, ML - 5.0);
        let _ = writeln!(s, r##"<line x1="{ML}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, ML + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ML - 8.0, y + 4.0, tick_label(t));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ML + pw / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">{}</text>"#,
        escape(y_label),
        y = MT + ph / 2.0
    );
}

pub fn line_plot(meta: &Meta, p: &LinePlot) -> String {
    let xr = range(p.series.iter().flat_map(|s| s.x.iter().copied())).unwrap_or((0.0, 1.0));
    let yr = range(p.series.iter().flat_map(|s| s.y.iter().copied())).unwrap_or((0.0, 1.0));
    let caption = {
        let mut c = format!("{}: {} vs {}", p.title, p.y_label, p.x_label);
        for s in &p.series {
            let _ = write!(c, "; {} ({} points)", s.label, s.x.len());
        }
        for n in &p.notes {
            let _ = write!(c, "; {n}");
        }
        c
    };
    let mut s = header(meta, &p.title, &caption);
    axes(&mut s, xr, yr, &p.x_label, &p.y_label);
    let (pw, ph) = (W - ML - MR, H - MT - MB);
    for (i, ser) in p.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        let mut pen_up = true;
        for (&x, &y) in ser.x.iter().zip(&ser.y) {
            if !(x.is_finite() && y.is_finite()) {
                pen_up = true;
                continue;
            }
            let px = ML + (x - xr.0) / (xr.1 - xr.0) * pw;
            let py = MT + ph - (y - yr.0) / (yr.1 - yr.0) * ph;
            let _ = write!(d, "{}{px:.2},{py:.2} ", if pen_up { "M" } else { "L" });
            pen_up = false;
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.trim_end());
        let ly = MT + 10.0 + 18.0 * i as f64;
        let lx = W - MR + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&ser.label));
    }
    for (i, n) in p.notes.iter().enumerate() {
        let y = MT + 30.0 + 18.0 * (p.series.len() + i) as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="11">{}</text>"#, W - MR + 12.0, escape(n));
    }
    s.push_str("</svg>\n");
    s
}

/// Piecewise-linear colour map from dark blue through green to yellow.
fn color(t: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 4] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.33, [49.0, 104.0, 142.0]),
        (0.66, [53.0, 183.0, 121.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let t = t.clamp(0.0, 1.0);
    let i = STOPS.iter().rposition(|s| s.0 <= t).unwrap().min(STOPS.len() - 2);
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let u = (t - a.0) / (b.0 - a.0);
    let c: Vec<u8> = (0..3).map(|k| (a.1[k] + u * (b.1[k] - a.1[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

#[derive(Debug, Clone)]
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// `z[i][j]` belongs to (x[i], y[j]); NaN cells are drawn grey.
    pub z: &'a [Vec<f64>],
    pub markers: Vec<(usize, usize, String)>,
}

pub fn heatmap(meta: &Meta, h: &Heatmap) -> String {
    let (zlo, zhi) = range(h.z.iter().flatten().copied()).unwrap_or((0.0, 1.0));
    let mut caption = format!(
        "{}: {} × {} grid over {} and {}, colour range [{}, {}]",
        h.title,
        h.x.len(),
        h.y.len(),
        h.x_label,
        h.y_label,
        tick_label(zlo),
        tick_label(zhi)
    );
    for (i, j, name) in &h.markers {
        let _ = write!(caption, "; {name} at ({}, {})", tick_label(h.x[*i]), tick_label(h.y[*j]));
    }
    let mut s = header(meta, h.title, &caption);
    let half = |a: &[f64]| if a.len() > 1 { 0.5 * (a[1] - a[0]) } else { 0.5 };
    let xr = (h.x[0] - half(h.x), h.x[h.x.len() - 1] + half(h.x));
    let yr = (h.y[0] - half(h.y), h.y[h.y.len() - 1] + half(h.y));
    let (pw, ph) = (W - ML - MR, H - MT - MB);
    let cw = pw / h.x.len() as f64;
    let chh = ph / h.y.len() as f64;
    for (i, col) in h.z.iter().enumerate() {
        for (j, &v) in col.iter().enumerate() {
            let fill = if v.is_finite() {
                color((v - zlo) / (zhi - zlo))
            } else {
                "#999999".into()
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                ML + i as f64 * cw,
                MT + ph - (j + 1) as f64 * chh,
                cw + 0.3,
                chh + 0.3
            );
        }
    }
    axes(&mut s, xr, yr, h.x_label, h.y_label);
    for (i, j, name) in &h.markers {
        let cx = ML + (*i as f64 + 0.5) * cw;
        let cy = MT + ph - (*j as f64 + 0.5) * chh;
        let _ = writeln!(s, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="none" stroke="#fff" stroke-width="2"/>"##);
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" fill="#fff">{}</text>"##, cx + 7.0, cy - 7.0, escape(name));
    }
    let bx = W - MR + 30.0;
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let _ = writeln!(
            s,
            r#"<rect x="{bx}" y="{:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            MT + ph - (k + 1) as f64 * ph / 50.0,
            ph / 50.0 + 0.3,
            color(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 24.0, MT + 10.0, tick_label(zhi));
    let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 24.0, MT + ph, tick_label(zlo));
    s.push_str("</svg>\n");
    s
}
