//! CSV and SVG emitters. Output depends only on the data and the precision,
//! never on timing or thread scheduling.

use std::fmt::Write as _;

use crate::ext::ExtReal;

/// `x` in scientific notation with `precision` significant digits;
/// non-finite values print as `inf`, `-inf` and `nan`.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // no negative zero in output
        let x = if x == 0.0 { 0.0 } else { x };
        format!("{:.*e}", precision.saturating_sub(1), x)
    }
}

pub fn format_ext(x: ExtReal, precision: usize) -> String {
    format_number(x.to_f64(), precision)
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// One painted layer of a region plot.
pub struct Layer<'a> {
    pub name: &'a str,
    pub fill: &'a str,
    pub opacity: f64,
    /// Row-major over `(x index, y index)`, `x` outer.
    pub cells: &'a [bool],
}

pub struct RegionPlot<'a> {
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub layers: Vec<Layer<'a>>,
}

const CELL: f64 = 8.0;
const MARGIN: f64 = 60.0;

/// SVG 1.1 image with one rectangle per painted cell; `y` grows upward.
pub fn render_svg(plot: &RegionPlot) -> String {
    let (w, h) = (plot.nx as f64 * CELL, plot.ny as f64 * CELL);
    let (width, height) = (w + 2.0 * MARGIN, h + 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="white" stroke="black"/>"#);
    for layer in &plot.layers {
        assert_eq!(layer.cells.len(), plot.nx * plot.ny, "layer size differs from grid");
        let _ = writeln!(s, r#"<g id="{}" fill="{}" fill-opacity="{}">"#, layer.name, layer.fill, layer.opacity);
        for i in 0..plot.nx {
            for j in 0..plot.ny {
                if layer.cells[i * plot.ny + j] {
                    let x = MARGIN + i as f64 * CELL;
                    let y = MARGIN + h - (j + 1) as f64 * CELL;
                    let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}"/>"#);
                }
            }
        }
        let _ = writeln!(s, "</g>");
    }
    let tick = |v: f64| format!("{v:.3}");
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    let base = MARGIN + h + 16.0;
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{base}" text-anchor="start">{}</text>"#, tick(plot.x_range.0));
    let _ = writeln!(s, r#"<text x="{}" y="{base}" text-anchor="end">{}</text>"#, MARGIN + w, tick(plot.x_range.1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, MARGIN + w / 2.0, base + 20.0, escape(plot.x_label));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 6.0, MARGIN + h, tick(plot.y_range.0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 6.0, MARGIN + 12.0, tick(plot.y_range.1));
    let (lx, ly) = (MARGIN - 40.0, MARGIN + h / 2.0);
    let _ = writeln!(
        s,
        r#"<text x="{lx}" y="{ly}" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(plot.y_label)
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
