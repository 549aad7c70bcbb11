//! Report bundle: profile and metric CSVs, an SVG overview and a text summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::extract::NormalizedProfile;
use super::metrics::EZ_EPSILON;
use crate::error::{Error, Result};
use crate::geometry::MeshStats;
use crate::solver::Diagnostics;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub z: f64,
    pub ez: Option<f64>,
    pub eq: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    /// `(key, value)` lines describing the run.
    pub case_summary: Vec<(String, String)>,
    pub mesh: Option<MeshStats>,
    pub diagnostics: Option<Diagnostics>,
    pub velocity: Option<NormalizedProfile>,
    pub velocity_datasets: Vec<(String, NormalizedProfile)>,
    pub pressure: Option<NormalizedProfile>,
    pub pressure_datasets: Vec<(String, NormalizedProfile)>,
    pub metrics: Vec<MetricRow>,
}

pub const EZ_DEFINITION: &str = "E_z(z) = |u_comp(z) - mean_k u_exp,k(z)| / max(|mean_k u_exp,k(z)|, eps), normalized values, eps = ";
pub const EQ_DEFINITION: &str =
    "E_Q(z) = 100 |Q_num(z) - Q| / Q, Q_num = 2 pi int_0^r_wall u_z r dr (64 panels x 4 Gauss points), Q prescribed";

fn num(v: f64) -> String {
    format!("{v:.11e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_label(s: &str) -> String {
    s.chars().map(|c| if c == ',' || c == '\n' || c == '"' { '_' } else { c }).collect()
}

pub fn profile_csv(computed: Option<&NormalizedProfile>, datasets: &[(String, NormalizedProfile)]) -> String {
    let mut s = String::from("z,computed_norm");
    for (label, _) in datasets {
        let _ = write!(s, ",{}", csv_label(label));
    }
    s.push('\n');
    if let Some(c) = computed {
        for &(z, v) in &c.samples {
            s.push_str(&num(z));
            s.push(',');
            s.push_str(&num(v));
            for (_, d) in datasets {
                s.push(',');
                s.push_str(&opt(d.interpolate(z)));
            }
            s.push('\n');
        }
    }
    s
}

pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut s = String::from("z,E_z,E_Q\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", num(r.z), opt(r.ez), opt(r.eq));
    }
    s
}

/// Parses a CSV written by this module: header names and rows of optional
/// numbers (empty cells are `None`).
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Result<Vec<Option<f64>>> = line
            .split(',')
            .map(|c| {
                if c.is_empty() {
                    Ok(None)
                } else {
                    c.parse::<f64>().map(Some).map_err(|e| Error::Parse {
                        path: "csv".into(),
                        line: i + 2,
                        message: e.to_string(),
                    })
                }
            })
            .collect();
        let row = row?;
        if row.len() != header.len() {
            return Err(Error::Parse {
                path: "csv".into(),
                line: i + 2,
                message: format!("{} cells for {} columns", row.len(), header.len()),
            });
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn summary_text(report: &ValidationReport) -> String {
    let mut s = String::from("[case]\n");
    for (k, v) in &report.case_summary {
        let _ = writeln!(s, "{k} = {v}");
    }
    if let Some(m) = &report.mesh {
        let _ = writeln!(
            s,
            "\n[mesh]\nn_elt = {}\nn_vertices = {}\nh_min = {}\nh_max = {}\nh_avg = {}",
            m.n_elt,
            m.n_vertices,
            num(m.h_min),
            num(m.h_max),
            num(m.h_avg)
        );
    }
    if let Some(d) = &report.diagnostics {
        let _ = writeln!(
            s,
            "\n[solver]\ndivergence_norm = {}\nnonlinear_iterations = {}\nlinear_iterations = {}",
            num(d.divergence),
            d.nonlinear_iterations,
            d.linear_iterations
        );
    }
    let _ = writeln!(s, "\n[metrics]\n{EZ_DEFINITION}{EZ_EPSILON:e}\n{EQ_DEFINITION}");
    if let Some(max) = report.metrics.iter().filter_map(|r| r.eq).reduce(f64::max) {
        let _ = writeln!(s, "max_E_Q_percent = {}", num(max));
    }
    if let Some(max) = report.metrics.iter().filter_map(|r| r.ez).reduce(f64::max) {
        let _ = writeln!(s, "max_E_z = {}", num(max));
    }
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Panel<'a> {
    title: &'a str,
    series: Vec<(String, Vec<(f64, f64)>, bool)>,
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn draw_panel(out: &mut String, panel: &Panel, x0: f64, y0: f64, w: f64, h: f64) {
    let pts: Vec<(f64, f64)> = panel.series.iter().flat_map(|s| s.1.iter().copied()).filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let _ = writeln!(out, r##"<g><rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="#444"/>"##);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#, x0 + w / 2.0, y0 - 6.0, xml_escape(panel.title));
    if pts.is_empty() {
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">no data</text></g>"#, x0 + w / 2.0, y0 + h / 2.0);
        return;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| y0 + h - (y - ymin) / (ymax - ymin) * h;
    for (k, (label, data, dashed)) in panel.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = data
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if *dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#, path.join(" "));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" fill="{color}">{}</text>"#,
            x0 + 6.0,
            y0 + 14.0 + 12.0 * k as f64,
            xml_escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-size="10">z: {xmin:.4} .. {xmax:.4} m</text><text x="{}" y="{}" font-size="10" text-anchor="end">y: {ymin:.4} .. {ymax:.4}</text></g>"#,
        y0 + h + 14.0,
        x0 + w,
        y0 + h + 14.0
    );
}

pub fn report_svg(report: &ValidationReport) -> String {
    let profile_panel = |title: &'static str, c: &Option<NormalizedProfile>, ds: &[(String, NormalizedProfile)]| {
        let mut series = Vec::new();
        if let Some(c) = c {
            series.push(("computed".to_string(), c.samples.clone(), false));
        }
        for (label, d) in ds {
            series.push((label.clone(), d.samples.clone(), true));
        }
        Panel { title, series }
    };
    let metric = |title: &'static str, f: fn(&MetricRow) -> Option<f64>| Panel {
        title,
        series: vec![(
            title.to_string(),
            report.metrics.iter().filter_map(|r| f(r).map(|v| (r.z, v))).collect(),
            false,
        )],
    };
    let panels = [
        profile_panel("centerline u_z / mean inlet velocity", &report.velocity, &report.velocity_datasets),
        profile_panel("wall pressure difference / dynamic pressure", &report.pressure, &report.pressure_datasets),
        metric("E_z", |r| r.ez),
        metric("E_Q (%)", |r| r.eq),
    ];
    let (w, h, pad) = (420.0, 260.0, 50.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        2.0 * w + 3.0 * pad,
        2.0 * h + 3.0 * pad
    );
    for (k, p) in panels.iter().enumerate() {
        let (col, row) = ((k % 2) as f64, (k / 2) as f64);
        draw_panel(&mut out, p, pad + col * (w + pad), pad + row * (h + pad), w, h);
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the five report files into `out_dir` and returns their paths.
pub fn write_report(report: &ValidationReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = [
        ("profiles_velocity.csv", profile_csv(report.velocity.as_ref(), &report.velocity_datasets)),
        ("profiles_pressure.csv", profile_csv(report.pressure.as_ref(), &report.pressure_datasets)),
        ("metrics.csv", metrics_csv(&report.metrics)),
        ("report.svg", report_svg(report)),
        ("summary.txt", summary_text(report)),
    ];
    let mut paths = Vec::new();
    for (name, content) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
