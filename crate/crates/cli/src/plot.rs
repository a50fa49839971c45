//! Self-contained SVG plots from CSV files.
//!
//! A CSV with a header row is a time series: the first column is the abscissa
//! and every other column becomes one line on a shared axis. A headerless
//! numeric matrix is a field snapshot (rows = y, columns = x) and is drawn as a
//! PNG heatmap embedded in the SVG, with a colour scale symmetric about zero.

use std::fmt::Write as _;

use base64::Engine;

use crate::{CliError, Result};

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Series { columns: Vec<String>, rows: Vec<Vec<f64>> },
    Matrix { rows: Vec<Vec<f64>> },
}

fn parse_row(rec: &csv::StringRecord) -> Option<Vec<f64>> {
    rec.iter().map(|s| s.trim().parse::<f64>().ok()).collect()
}

/// Classifies and parses CSV text.
pub fn read_layout(text: &str) -> Result<Layout> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = rdr
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::Data(format!("malformed CSV: {e}")))?;
    let records: Vec<_> = records.into_iter().filter(|r| !(r.len() == 1 && r[0].trim().is_empty())).collect();
    let Some(first) = records.first() else {
        return Err(CliError::Data("no data".into()));
    };
    let width = first.len();
    if let Some((k, r)) = records.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(CliError::Data(format!("malformed CSV: line {} has {} fields, expected {width}", k + 1, r.len())));
    }
    let numeric = |rs: &[csv::StringRecord], offset: usize| -> Result<Vec<Vec<f64>>> {
        rs.iter()
            .enumerate()
            .map(|(k, r)| {
                parse_row(r).ok_or_else(|| CliError::Data(format!("malformed CSV: non-numeric value on line {}", k + offset + 1)))
            })
            .collect()
    };
    if parse_row(first).is_some() {
        return Ok(Layout::Matrix { rows: numeric(&records, 0)? });
    }
    let columns: Vec<String> = first.iter().map(|s| s.trim().to_string()).collect();
    let rows = numeric(&records[1..], 1)?;
    if rows.is_empty() {
        return Err(CliError::Data("no data".into()));
    }
    if columns.len() < 2 {
        return Err(CliError::Data("malformed CSV: a time series needs at least two columns".into()));
    }
    Ok(Layout::Series { columns, rows })
}

pub fn render(text: &str, title: &str) -> Result<String> {
    match read_layout(text)? {
        Layout::Series { columns, rows } => Ok(line_plot(title, &columns, &rows)),
        Layout::Matrix { rows } => heatmap(title, &rows),
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn finite_range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 + 1e-12 * lo.abs().max(hi.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(title));
}

/// Single-axis line plot: first column against each remaining column.
pub fn line_plot(title: &str, columns: &[String], rows: &[Vec<f64>]) -> String {
    let (x0, x1) = finite_range(rows.iter().map(|r| r[0]));
    let (y0, y1) = finite_range(rows.iter().flat_map(|r| r[1..].iter().copied()));
    let pw = W - 2.0 * MARGIN - 100.0;
    let ph = H - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN + (1.0 - (y - y0) / (y1 - y0)) * ph;
    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(out, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(xv),
            MARGIN + ph + 16.0,
            fmt_tick(xv)
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN - 4.0, sy(yv) + 4.0, fmt_tick(yv));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN + pw / 2.0,
        H - 12.0,
        esc(&columns[0])
    );
    for (c, name) in columns.iter().enumerate().skip(1) {
        let colour = PALETTE[(c - 1) % PALETTE.len()];
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r[0].is_finite() && r[c].is_finite())
            .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[c])))
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = MARGIN + 14.0 * c as f64;
        let lx = MARGIN + pw + 10.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="{colour}" stroke-width="2"/>"#, ly - 4.0, lx + 16.0, ly - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 20.0, esc(name));
    }
    out.push_str("</svg>\n");
    out
}

/// Diverging blue-white-red map on `[-1, 1]`.
pub fn diverging(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    let (blue, white, red) = ([33.0, 102.0, 172.0], [247.0, 247.0, 247.0], [178.0, 24.0, 43.0]);
    let (from, to, s) = if t < 0.0 { (white, blue, -t) } else { (white, red, t) };
    [lerp(from[0], to[0], s), lerp(from[1], to[1], s), lerp(from[2], to[2], s)]
}

/// Symmetric colour limit `max |f|` (1 for an all-zero field).
pub fn symmetric_limit(rows: &[Vec<f64>]) -> f64 {
    let m = rows.iter().flatten().filter(|v| v.is_finite()).fold(0.0_f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn encode_png(width: usize, height: usize, rgb: &[u8]) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut bytes, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| CliError::Data(format!("png: {e}")))?;
        w.write_image_data(rgb).map_err(|e| CliError::Data(format!("png: {e}")))?;
    }
    Ok(bytes)
}

/// Heatmap of a matrix with rows indexed by `y` (row 0 at the bottom).
pub fn heatmap(title: &str, rows: &[Vec<f64>]) -> Result<String> {
    let ny = rows.len();
    let nx = rows[0].len();
    let lim = symmetric_limit(rows);
    let mut rgb = Vec::with_capacity(nx * ny * 3);
    for row in rows.iter().rev() {
        for v in row {
            rgb.extend_from_slice(&diverging(if v.is_finite() { v / lim } else { 0.0 }));
        }
    }
    let field = base64::engine::general_purpose::STANDARD.encode(encode_png(nx, ny, &rgb)?);
    let bar: Vec<u8> = (0..256).rev().flat_map(|k| diverging(2.0 * k as f64 / 255.0 - 1.0)).collect();
    let bar = base64::engine::general_purpose::STANDARD.encode(encode_png(1, 256, &bar)?);
    let side = (H - 2.0 * MARGIN).min(W - 2.0 * MARGIN - 120.0);
    let (pw, ph) = if nx >= ny {
        (side, side * ny as f64 / nx as f64)
    } else {
        (side * nx as f64 / ny as f64, side)
    };
    let bx = MARGIN + pw + 30.0;
    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<image x="{MARGIN}" y="{MARGIN}" width="{pw:.2}" height="{ph:.2}" preserveAspectRatio="none" style="image-rendering:pixelated" href="data:image/png;base64,{field}"/>"#
    );
    let _ = writeln!(out, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<image x="{bx}" y="{MARGIN}" width="16" height="{ph:.2}" preserveAspectRatio="none" href="data:image/png;base64,{bar}"/>"#
    );
    let _ = writeln!(out, r#"<rect x="{bx}" y="{MARGIN}" width="16" height="{ph:.2}" fill="none" stroke="black"/>"#);
    for (frac, v) in [(0.0, lim), (0.5, 0.0), (1.0, -lim)] {
        let _ = writeln!(
            out,
            r#"<text class="colorbar-label" x="{}" y="{:.2}">{}</text>"#,
            bx + 22.0,
            MARGIN + frac * ph + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(out, r#"<desc>colour scale [{:e}, {:e}]</desc>"#, -lim, lim);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_is_symmetric_and_white_at_zero() {
        assert_eq!(diverging(0.0), [247, 247, 247]);
        assert_eq!(diverging(1.0), [178, 24, 43]);
        assert_eq!(diverging(-1.0), [33, 102, 172]);
    }

    #[test]
    fn classifies_layouts() {
        assert!(matches!(read_layout("t,e\n0,1\n1,2\n").unwrap(), Layout::Series { .. }));
        assert!(matches!(read_layout("0,1\n1,2\n").unwrap(), Layout::Matrix { .. }));
        assert!(matches!(read_layout(""), Err(CliError::Data(m)) if m == "no data"));
        assert!(matches!(read_layout("t,e\n"), Err(CliError::Data(m)) if m == "no data"));
        assert!(read_layout("t,e\n0,x\n").is_err());
        assert!(read_layout("t,e\n0,1,2\n").is_err());
    }
}
