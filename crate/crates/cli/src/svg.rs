//! Line plot rendered from a CSV table. The first column is the abscissa;
//! every other numeric column becomes a series. Flag columns such as
//! `clamped` are skipped.

use std::fmt::Write;

use crate::error::CliError;
use crate::table::Table;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: &[f64]) -> Self {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // Spans of several decades with no non-positive values read better on a log scale.
        let log = lo > 0.0 && hi / lo > 1e3;
        let (lo, hi) = if log {
            (lo.log10(), hi.log10())
        } else {
            (lo, hi)
        };
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        };
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn label(&self, f: f64) -> String {
        let v = self.lo + f * (self.hi - self.lo);
        format!("{:.3e}", if self.log { 10f64.powf(v) } else { v })
    }
}

fn parse_column(table: &Table, col: usize) -> Option<Vec<f64>> {
    table
        .rows
        .iter()
        .map(|r| r.get(col)?.parse().ok())
        .collect()
}

pub fn render(table: &Table) -> Result<String, CliError> {
    if table.rows.is_empty() || table.header.len() < 2 {
        return Err(CliError::Config("nothing to plot".into()));
    }
    let x = parse_column(table, 0)
        .ok_or_else(|| CliError::Config(format!("column {} is not numeric", table.header[0])))?;
    let series: Vec<(&str, Vec<f64>)> = (1..table.header.len())
        .filter(|&c| table.header[c] != "clamped")
        .filter_map(|c| Some((table.header[c].as_str(), parse_column(table, c)?)))
        .collect();
    let all_y: Vec<f64> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    let (xa, ya) = (Axis::fit(&x), Axis::fit(&all_y));
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let px = |v: f64| LEFT + xa.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - ya.frac(v)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let gx = LEFT + f * pw;
        let gy = TOP + (1.0 - f) * ph;
        let _ = writeln!(
            s,
            r#"<text x="{gx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            xa.label(f)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            gy + 4.0,
            ya.label(f)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 16.0,
        table.header[0]
    );
    for (k, (name, y)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = x
            .iter()
            .zip(y)
            .filter(|(xv, yv)| !(ya.log && **yv <= 0.0) && !(xa.log && **xv <= 0.0))
            .map(|(xv, yv)| format!("{:.2},{:.2}", px(*xv), py(*yv)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 16.0 * (k as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            W - RIGHT + 12.0,
            W - RIGHT + 36.0,
            W - RIGHT + 42.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
