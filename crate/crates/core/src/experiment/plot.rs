//! Self-contained SVG line charts from CSV files.
//!
//! The first column is the abscissa. Every other column whose first data row
//! parses as a number becomes a series; text columns (such as a verdict) are
//! ignored. Output depends only on the input bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_Y: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub x_label: String,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
}

/// Parse CSV text into numeric columns. Errors carry 1-based line numbers.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "need at least two columns".into(),
        });
    }
    let mut numeric: Option<Vec<bool>> = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != headers.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", headers.len(), row.len()),
            });
        }
        let mask = numeric.get_or_insert_with(|| {
            row.iter()
                .enumerate()
                .map(|(i, v)| i == 0 || v.trim().parse::<f64>().is_ok())
                .collect()
        });
        for (i, field) in row.iter().enumerate() {
            if !mask[i] {
                continue;
            }
            let v = field.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("column '{}': '{field}' is not a number", &headers[i]),
            })?;
            columns[i].push(v);
        }
    }
    let mask = numeric.ok_or(Error::Parse {
        line: 2,
        message: "no data rows".into(),
    })?;
    let mut columns = columns.into_iter();
    let x = columns.next().unwrap();
    let series = headers
        .iter()
        .skip(1)
        .zip(columns)
        .zip(mask.iter().skip(1))
        .filter(|(_, &keep)| keep)
        .map(|((h, c), _)| (h.to_string(), c))
        .collect();
    Ok(Table {
        x_label: headers[0].to_string(),
        x,
        series,
    })
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300_f64.max(1e-12 * hi.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(table: &Table, title: &str) -> String {
    let (x0, x1) = range(table.x.iter().copied());
    let (y0, y1) = range(table.series.iter().flat_map(|(_, v)| v.iter().copied()));
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_Y + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3e}</text>"#,
            sx(xv),
            HEIGHT - MARGIN_Y + 16.0,
            xv
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3e}</text>"#,
            MARGIN_LEFT - 6.0,
            sy(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 6.0,
        escape(&table.x_label)
    );
    for (i, (name, ys)) in table.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for (&x, &y) in table.x.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.trim_end()
        );
        let ly = MARGIN_Y + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, lx + 26.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

/// Render each CSV to `<out_dir>/<stem>.svg`; returns the written paths.
pub fn emit_plots(csv_paths: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for path in csv_paths {
        let text = std::fs::read_to_string(path)?;
        let table = parse_table(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "plot".into());
        let out = out_dir.join(format!("{stem}.svg"));
        std::fs::write(&out, render_svg(&table, &stem))?;
        written.push(out);
    }
    Ok(written)
}
