use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{csv_err, read_results, SweepTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// An outer-iteration trace CSV: objective against iteration.
    Convergence,
    /// A results CSV: mean final value against pmax, one series per algorithm.
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    fn to_dat(&self, x_label: &str, y_label: &str) -> String {
        let mut out = format!("# {x_label} {y_label}\n");
        for (x, y) in &self.points {
            writeln!(out, "{x} {y}").expect("writing to a String cannot fail");
        }
        out
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A minimal static SVG line chart.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 50.0);
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        let pad = 0.5 * y0.abs().max(1e-12);
        y0 -= pad;
        y1 += pad;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let sy = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#,
        (left + w - right) / 2.0,
        escape(title)
    );
    let (ax0, ax1, ay0, ay1) = (left, w - right, h - bottom, top);
    let _ = writeln!(
        svg,
        r#"<path d="M{ax0},{ay1} L{ax0},{ay0} L{ax1},{ay0}" fill="none" stroke="black"/>"#
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="{anchor}">{}</text>"#,
            sx(v),
            ay0 + 16.0,
            format_tick(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            ax0 - 6.0,
            sy(v) + 4.0,
            format_tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        (ax0 + ax1) / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let ly = top + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            ax1 + 12.0,
            ax1 + 32.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
            ax1 + 38.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn read_convergence(path: &Path) -> Result<Series> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column `{name}`"),
        })
    };
    let (ci, co) = (col("iter")?, col("objective_nats")?);
    let mut points = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| Error::Parse {
                line: n + 2,
                message: "non-numeric trace entry".into(),
            })
        };
        let iter = field(ci)?;
        // The initial point is not an iteration.
        if iter >= 1.0 {
            points.push((iter, field(co)?));
        }
    }
    Ok(Series {
        name: "objective".into(),
        points,
    })
}

/// Write two-column `.dat` files and an SVG chart into `out_dir`; returns the
/// written paths.
pub fn emit_plot_data(input: impl AsRef<Path>, kind: PlotKind, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    match kind {
        PlotKind::Convergence => {
            let series = read_convergence(input.as_ref())?;
            let dat = out_dir.join("convergence.dat");
            fs::write(&dat, series.to_dat("iteration", "objective_nats"))?;
            let svg = out_dir.join("convergence.svg");
            fs::write(
                &svg,
                svg_line_chart("Convergence", "outer iteration", "objective (nats)", &[series]),
            )?;
            written.extend([dat, svg]);
        }
        PlotKind::Sweep => {
            let table = SweepTable::from_rows(&read_results(input.as_ref())?);
            let mut all = Vec::new();
            for (a, means) in table.algorithms.iter().zip(&table.means) {
                let series = Series {
                    name: a.name().into(),
                    points: table.pmax_dbm.iter().copied().zip(means.iter().copied()).collect(),
                };
                let dat = out_dir.join(format!("sweep_{}.dat", a.name()));
                fs::write(&dat, series.to_dat("pmax_dbm", "mean_slqp_nats"))?;
                written.push(dat);
                all.push(series);
            }
            let svg = out_dir.join("sweep.svg");
            fs::write(&svg, svg_line_chart("Mean SLqP vs pmax", "pmax (dBm)", "mean SLqP (nats)", &all))?;
            written.push(svg);
        }
    }
    Ok(written)
}
