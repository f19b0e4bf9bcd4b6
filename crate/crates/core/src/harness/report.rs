//! CSV records, per-algorithm regret curves and an SVG line chart.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::experiment::RegretRecord;

pub const CSV_HEADER: [&str; 7] = [
    "algorithm",
    "trial",
    "n",
    "selected_index",
    "y_observed",
    "recommendation_index",
    "simple_regret",
];

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(records: &[RegretRecord], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for r in records {
        wtr.write_record([
            r.algorithm.clone(),
            r.trial.to_string(),
            r.n.to_string(),
            r.selected_index.to_string(),
            format_float(r.y_observed),
            r.recommendation_index.to_string(),
            format_float(r.simple_regret),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn export_csv(records: &[RegretRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<RegretRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidInput(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let field = |k: usize| -> Result<&str> {
            row.get(k)
                .ok_or_else(|| Error::InvalidInput(format!("row {}: missing column {k}", i + 1)))
        };
        let num = |k: usize| -> Result<usize> {
            field(k)?.parse().map_err(|_| {
                Error::InvalidInput(format!("row {}: bad integer in column {k}", i + 1))
            })
        };
        let real = |k: usize| -> Result<f64> {
            field(k)?.parse().map_err(|_| {
                Error::InvalidInput(format!("row {}: bad number in column {k}", i + 1))
            })
        };
        out.push(RegretRecord {
            algorithm: field(0)?.to_string(),
            trial: num(1)?,
            n: num(2)?,
            selected_index: num(3)?,
            y_observed: real(4)?,
            recommendation_index: num(5)?,
            simple_regret: real(6)?,
        });
    }
    Ok(out)
}

pub fn parse_csv_file(path: &Path) -> Result<Vec<RegretRecord>> {
    read_csv(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over trials divided by `√T`.
    pub stderr: f64,
    pub trials: usize,
}

/// Mean and standard-error regret per step, keyed by algorithm.
pub fn aggregate(records: &[RegretRecord]) -> BTreeMap<String, Vec<CurvePoint>> {
    let mut groups: BTreeMap<&str, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in records {
        groups
            .entry(&r.algorithm)
            .or_default()
            .entry(r.n)
            .or_default()
            .push(r.simple_regret);
    }
    groups
        .into_iter()
        .map(|(alg, by_n)| {
            let curve = by_n
                .into_iter()
                .map(|(n, vals)| {
                    let t = vals.len() as f64;
                    let mean = vals.iter().sum::<f64>() / t;
                    let stderr = if vals.len() > 1 {
                        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
                        (var / t).sqrt()
                    } else {
                        0.0
                    };
                    CurvePoint {
                        n,
                        mean,
                        stderr,
                        trials: vals.len(),
                    }
                })
                .collect();
            (alg.to_string(), curve)
        })
        .collect()
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Mean regret ± one standard error against `n`, log-scaled y axis.
pub fn render_svg_string(curves: &BTreeMap<String, Vec<CurvePoint>>) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 150.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let positives = curves
        .values()
        .flatten()
        .flat_map(|p| [p.mean, p.mean - p.stderr, p.mean + p.stderr])
        .filter(|v| *v > 0.0 && v.is_finite());
    let (mut lo, mut hi) = positives.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        lo = 1e-3;
        hi = 1.0;
    }
    let floor = lo;
    let (ylo, yhi) = (
        lo.log10().floor(),
        hi.log10().ceil().max(lo.log10().floor() + 1.0),
    );
    let nmax = curves
        .values()
        .flatten()
        .map(|p| p.n)
        .max()
        .unwrap_or(1)
        .max(2) as f64;
    let sx = |n: f64| left + (n - 1.0) / (nmax - 1.0) * pw;
    let sy = |v: f64| top + (yhi - v.max(floor).log10()) / (yhi - ylo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
    for e in (ylo as i32)..=(yhi as i32) {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">1e{e}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
    }
    for i in 0..=4 {
        let n = 1.0 + (nmax - 1.0) * i as f64 / 4.0;
        let x = sx(n);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            top + ph + 16.0,
            n.round()
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">n</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">simple regret</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, (alg, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if curve.is_empty() {
            continue;
        }
        let mut band = String::new();
        for p in curve {
            let _ = write!(band, "{:.2},{:.2} ", sx(p.n as f64), sy(p.mean + p.stderr));
        }
        for p in curve.iter().rev() {
            let _ = write!(band, "{:.2},{:.2} ", sx(p.n as f64), sy(p.mean - p.stderr));
        }
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = curve
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.n as f64), sy(p.mean)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
            line.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            left + pw + 12.0,
            left + pw + 32.0,
            left + pw + 38.0,
            ly + 4.0,
            xml_escape(alg)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(curves: &BTreeMap<String, Vec<CurvePoint>>, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg_string(curves))?;
    Ok(())
}
