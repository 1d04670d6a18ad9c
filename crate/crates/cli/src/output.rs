//! Number formatting, CSV writing and minimal SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// `v` with 12 significant digits, shortest form (like C's `%.12g`).
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    // Rounding may carry into the next decade; scientific output handles that itself.
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{exponent}")
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo < hi {
        (lo, hi)
    } else {
        (lo - 1.0, lo + 1.0)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
        y0 + 15.0,
        fmt_short(x.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{x1}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
        y0 + 15.0,
        fmt_short(x.1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{y1}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
        x0 - 4.0,
        fmt_short(y.1)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{y0}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
        x0 - 4.0,
        fmt_short(y.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

fn fmt_short(v: f64) -> String {
    format!("{v:.3}")
}

fn scale(v: f64, (lo, hi): (f64, f64), a: f64, b: f64) -> f64 {
    a + (v - lo) / (hi - lo) * (b - a)
}

/// Polyline of `(x, y)` points.
pub fn line_plot(points: &[(f64, f64)], title: &str, xlabel: &str, ylabel: &str) -> String {
    let x = bounds(points.iter().map(|p| p.0));
    let y = bounds(points.iter().map(|p| p.1));
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x, y, xlabel, ylabel);
    out.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points=""#);
    for (i, &(px, py)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(
            out,
            "{:.2},{:.2}",
            scale(px, x, MARGIN, WIDTH - MARGIN),
            scale(py, y, HEIGHT - MARGIN, MARGIN)
        );
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

/// Heatmap of `values[row][col]` in dB, rows along y, clipped below at `floor_db`.
pub fn heatmap(
    values: &[Vec<f64>],
    x: (f64, f64),
    y: (f64, f64),
    floor_db: f64,
    title: &str,
    xlabel: &str,
    ylabel: &str,
) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let mut out = String::new();
    header(&mut out, title);
    let cw = (WIDTH - 2.0 * MARGIN) / cols.max(1) as f64;
    let rh = (HEIGHT - 2.0 * MARGIN) / rows.max(1) as f64;
    for (r, row) in values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let t = ((v.max(floor_db) - floor_db) / -floor_db).clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
                MARGIN + c as f64 * cw,
                HEIGHT - MARGIN - (r + 1) as f64 * rh,
                cw + 0.05,
                rh + 0.05
            );
        }
    }
    axes(&mut out, x, y, xlabel, ylabel);
    out.push_str("</svg>\n");
    out
}
