//! Minimal dependency-free SVG line plots. Output is byte-stable for
//! identical input: fixed viewport, fixed formatting, no timestamps and no
//! randomness, so emitted figures can serve as golden files.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sweep::SweepTable;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn fmt_coord(v: f64) -> String {
    format!("{v:.3}")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

/// Evenly spaced tick positions covering [lo, hi].
fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

/// Render selected numeric columns of a sweep table against `f` as an SVG
/// line plot, one polyline per column.
pub fn render_plot(
    table: &SweepTable,
    columns: &[&str],
    title: &str,
    y_label: &str,
) -> Result<String> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if columns.is_empty() {
        return Err(Error::UnknownColumn("no columns requested".to_string()));
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r.f).collect();
    let series: Vec<(String, Vec<f64>)> = columns
        .iter()
        .map(|&name| table.column(name).map(|v| (name.to_string(), v)))
        .collect::<Result<_>>()?;
    render_series(&xs, &series, title, y_label)
}

/// Render raw series against a shared abscissa; used for derived figure
/// columns that are not sweep-table columns.
pub fn render_series(
    xs: &[f64],
    series: &[(String, Vec<f64>)],
    title: &str,
    y_label: &str,
) -> Result<String> {
    if xs.is_empty() || series.is_empty() {
        return Err(Error::EmptyTable);
    }
    let x_lo = xs.first().copied().unwrap();
    let x_hi = xs.last().copied().unwrap();
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for (_, v) in series {
        for &y in v {
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let pad = 0.05 * (y_hi - y_lo);
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);

    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo).max(f64::MIN_POSITIVE) * pw;
    let y_of = |y: f64| MARGIN_TOP + ph - (y - y_lo) / (y_hi - y_lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        fmt_coord(MARGIN_LEFT + pw / 2.0),
        title
    );

    // frame
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(MARGIN_TOP),
        fmt_coord(pw),
        fmt_coord(ph)
    );

    // x ticks and grid
    for t in ticks(x_lo, x_hi, 7) {
        let x = x_of(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#cccccc" stroke-width="0.5"/>"##,
            x0 = fmt_coord(x),
            y0 = fmt_coord(MARGIN_TOP),
            y1 = fmt_coord(MARGIN_TOP + ph)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            fmt_coord(x),
            fmt_coord(MARGIN_TOP + ph + 18.0),
            fmt_tick(t)
        );
    }
    // y ticks and grid
    for t in ticks(y_lo, y_hi, 6) {
        let y = y_of(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#cccccc" stroke-width="0.5"/>"##,
            x0 = fmt_coord(MARGIN_LEFT),
            x1 = fmt_coord(MARGIN_LEFT + pw),
            y0 = fmt_coord(y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{}</text>"#,
            fmt_coord(MARGIN_LEFT - 6.0),
            fmt_coord(y + 4.0),
            fmt_tick(t)
        );
    }

    // axis labels
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">f</text>"#,
        fmt_coord(MARGIN_LEFT + pw / 2.0),
        fmt_coord(HEIGHT - 14.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        fmt_coord(MARGIN_TOP + ph / 2.0),
        fmt_coord(MARGIN_TOP + ph / 2.0),
        y_label
    );

    // series
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut points = String::new();
        for (&x, &y) in xs.iter().zip(ys) {
            let _ = write!(points, "{},{} ", fmt_coord(x_of(x)), fmt_coord(y_of(y)));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points.trim_end(),
            color
        );
        // legend entry
        let ly = MARGIN_TOP + 16.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            x0 = fmt_coord(MARGIN_LEFT + pw + 10.0),
            x1 = fmt_coord(MARGIN_LEFT + pw + 34.0),
            y = fmt_coord(ly)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            fmt_coord(MARGIN_LEFT + pw + 40.0),
            fmt_coord(ly + 4.0),
            name
        );
    }

    s.push_str("</svg>\n");
    Ok(s)
}

/// Render and write to a file.
pub fn emit_plot(
    table: &SweepTable,
    columns: &[&str],
    title: &str,
    y_label: &str,
    path: &std::path::Path,
) -> Result<()> {
    let svg = render_plot(table, columns, title, y_label)?;
    std::fs::write(path, svg)?;
    Ok(())
}
