//! SVG charts and CSV tables. Output is a pure function of the report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::rational;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A straight line in log-log space: `ln y = slope ln x + intercept`.
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Log axis over whole decades containing the data.
struct LogAxis {
    lo: i32,
    hi: i32,
}

impl LogAxis {
    fn fit(values: impl Iterator<Item = f64>) -> LogAxis {
        let (mut lo, mut hi) = (i32::MAX, i32::MIN);
        for v in values.filter(|v| *v > 0.0) {
            lo = lo.min(v.log10().floor() as i32);
            hi = hi.max(v.log10().ceil() as i32);
        }
        if lo > hi {
            return LogAxis { lo: 0, hi: 1 };
        }
        if lo == hi {
            hi += 1;
        }
        LogAxis { lo, hi }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo as f64) / (self.hi - self.lo) as f64
    }

    fn ticks(&self) -> Vec<f64> {
        let mults: &[f64] = if self.hi - self.lo <= 2 { &[1.0, 2.0, 5.0] } else { &[1.0] };
        let mut out = Vec::new();
        for k in self.lo..=self.hi {
            for m in mults {
                let v = m * 10f64.powi(k);
                if k < self.hi || *m == 1.0 {
                    out.push(v);
                }
            }
        }
        out
    }
}

fn px_x(f: f64) -> f64 {
    LEFT + f * (WIDTH - LEFT - RIGHT)
}

fn px_y(f: f64) -> f64 {
    HEIGHT - BOTTOM - f * (HEIGHT - TOP - BOTTOM)
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        px_x(0.5),
        HEIGHT - 14.0,
        esc(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        px_y(0.5),
        px_y(0.5),
        esc(ylabel)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{:.2} {:.2}V{:.2}H{:.2}" fill="none" stroke="black"/>"#,
        px_x(0.0),
        px_y(1.0),
        px_y(0.0),
        px_x(1.0)
    );
}

fn x_tick(out: &mut String, f: f64, label: &str) {
    let x = px_x(f);
    let y = px_y(0.0);
    let _ = writeln!(out, r#"<path d="M{x:.2} {y:.2}v5" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        y + 18.0,
        esc(label)
    );
}

fn y_tick(out: &mut String, f: f64, label: &str) {
    let x = px_x(0.0);
    let y = px_y(f);
    let _ = writeln!(out, r#"<path d="M{x:.2} {y:.2}h-5" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        x - 8.0,
        y + 4.0,
        esc(label)
    );
}

/// Log-log chart with optional fitted line and annotation.
pub fn loglog_svg(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[Series],
    fit: Option<&FitLine>,
    note: Option<&str>,
) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let ax = LogAxis::fit(all().map(|p| p.0));
    let ay = LogAxis::fit(all().map(|p| p.1));
    let mut out = String::new();
    header(&mut out, title, xlabel, ylabel);
    for t in ax.ticks() {
        x_tick(&mut out, ax.frac(t), &tick_label(t));
    }
    for t in ay.ticks() {
        y_tick(&mut out, ay.frac(t), &tick_label(t));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| (px_x(ax.frac(*x)), px_y(ay.frac(*y))))
            .collect();
        if pts.len() > 1 {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}"/>"#,
                d.join(" ")
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            px_x(0.72),
            ly,
            px_x(0.72) + 14.0,
            ly + 9.0,
            esc(&s.label)
        );
    }
    if let (Some(f), Some((x0, x1))) = (fit, x_range(series)) {
        let y = |x: f64| (f.slope * x.ln() + f.intercept).exp();
        let _ = writeln!(
            out,
            r##"<path d="M{:.2} {:.2}L{:.2} {:.2}" stroke="#555555" stroke-dasharray="6 4"/>"##,
            px_x(ax.frac(x0)),
            px_y(ay.frac(y(x0))),
            px_x(ax.frac(x1)),
            px_y(ay.frac(y(x1)))
        );
    }
    if let Some(n) = note {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            px_x(0.04),
            TOP + 12.0,
            esc(n)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn x_range(series: &[Series]) -> Option<(f64, f64)> {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|x| *x > 0.0);
    xs.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((a, b)) => Some((a.min(x), b.max(x))),
    })
}

/// Smallest of `1, 2, 5` times a power of ten that is `>= v`.
fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 {
        return 1.0;
    }
    let p = 10f64.powi(v.log10().floor() as i32);
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * p >= v {
            return m * p;
        }
    }
    10.0 * p
}

pub fn bar_svg(title: &str, ylabel: &str, bars: &[(String, f64)]) -> String {
    let top = nice_ceiling(bars.iter().map(|b| b.1).fold(0.0, f64::max));
    let mut out = String::new();
    header(&mut out, title, "", ylabel);
    for k in 0..=5 {
        let v = top * k as f64 / 5.0;
        y_tick(&mut out, k as f64 / 5.0, &tick_label(v));
    }
    let n = bars.len().max(1) as f64;
    let slot = 1.0 / n;
    for (i, (label, v)) in bars.iter().enumerate() {
        let x0 = px_x(slot * (i as f64 + 0.2));
        let x1 = px_x(slot * (i as f64 + 0.8));
        let y = px_y(v / top);
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            x1 - x0,
            px_y(0.0) - y
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            y - 4.0,
            tick_label(*v)
        );
        x_tick(&mut out, slot * (i as f64 + 0.5), label);
    }
    out.push_str("</svg>\n");
    out
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(header).map_err(fmt)?;
    for r in rows {
        w.write_record(&r).map_err(fmt)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// File name and contents of every artifact for the report.
pub fn render(report: &ExperimentReport) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    if !report.rich.is_empty() {
        let series: Vec<Series> = report
            .rich
            .iter()
            .map(|t| Series {
                label: format!("{} (L={})", t.label, t.lines),
                points: t.rows.iter().map(|r| (r.r as f64, r.count as f64)).collect(),
            })
            .collect();
        files.push(("rich.svg".into(), loglog_svg("Rich points", "r", "|P_r|", &series, None, None)));
        let rows = report
            .rich
            .iter()
            .flat_map(|t| {
                t.rows
                    .iter()
                    .map(|r| vec![t.label.clone(), t.lines.to_string(), r.r.to_string(), r.count.to_string()])
            })
            .collect();
        files.push(("rich.csv".into(), csv_string(&["label", "lines", "r", "count"], rows)?));
    }
    if !report.census.is_empty() {
        let many = report.census.len() > 1;
        let name = |c: &super::report::CensusRow, k: &str| if many { format!("{} {k}", c.label) } else { k.to_string() };
        let bars: Vec<(String, f64)> = report
            .census
            .iter()
            .flat_map(|c| {
                [
                    (name(c, "total"), c.total as f64),
                    (name(c, "parallel"), c.parallel as f64),
                    (name(c, "intersecting"), c.intersecting as f64),
                ]
            })
            .collect();
        let title = if many { "Quadruple census".to_string() } else { format!("Quadruple census: {}", report.census[0].label) };
        files.push(("census.svg".into(), bar_svg(&title, "quadruples", &bars)));
        let rows = report
            .census
            .iter()
            .map(|c| {
                vec![
                    c.label.clone(),
                    c.n.to_string(),
                    c.total.to_string(),
                    c.parallel.to_string(),
                    c.intersecting.to_string(),
                ]
            })
            .collect();
        files.push((
            "census.csv".into(),
            csv_string(&["label", "n", "total", "parallel", "intersecting"], rows)?,
        ));
    }
    if let Some(s) = &report.scaling {
        let series = [Series {
            label: "|Q(P)|".into(),
            points: s.rows.iter().map(|r| (r.n as f64, r.quadruples as f64)).collect(),
        }];
        let fit = s.fit.as_ref().map(|f| FitLine {
            slope: f.slope_approx,
            intercept: f.intercept_approx,
        });
        let note = s
            .fit
            .as_ref()
            .map(|f| format!("fitted slope {:.3} (limit {})", f.slope_approx, rational::format(&s.slope_limit)));
        files.push((
            "scaling.svg".into(),
            loglog_svg("Quadruples on grids", "N", "|Q(P)|", &series, fit.as_ref(), note.as_deref()),
        ));
        let rows = s
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.n.to_string(),
                    r.side.to_string(),
                    r.lines.to_string(),
                    r.quadruples.to_string(),
                    r.parallel.to_string(),
                    r.intersecting.to_string(),
                    r.distinct_distances.to_string(),
                    rational::format(&r.dd_bound),
                    r.dd_holds.to_string(),
                ]
            })
            .collect();
        files.push((
            "scaling.csv".into(),
            csv_string(
                &["n", "side", "lines", "quadruples", "parallel", "intersecting", "distinct_distances", "dd_bound", "dd_holds"],
                rows,
            )?,
        ));
    }
    if !report.partition.is_empty() {
        let mut backends: Vec<&str> = report.partition.iter().map(|p| p.backend.as_str()).collect();
        backends.sort_unstable();
        backends.dedup();
        let mut series = Vec::new();
        for b in backends {
            let mut sizes: Vec<usize> = report.partition.iter().filter(|p| p.backend == b).map(|p| p.points).collect();
            sizes.sort_unstable();
            sizes.dedup();
            for n in sizes {
                series.push(Series {
                    label: format!("{b} |S|={n}"),
                    points: report
                        .partition
                        .iter()
                        .filter(|p| p.backend == b && p.points == n)
                        .map(|p| (p.degree as f64, rational::to_f64(&p.ratio)))
                        .collect(),
                });
            }
        }
        files.push((
            "partition.svg".into(),
            loglog_svg("Largest cell", "D", "max cell * D^3 / |S|", &series, None, None),
        ));
        let rows = report
            .partition
            .iter()
            .map(|p| {
                vec![
                    p.backend.clone(),
                    p.points.to_string(),
                    p.degree.to_string(),
                    p.cells.to_string(),
                    p.max_cell.to_string(),
                    rational::format(&p.ratio),
                ]
            })
            .collect();
        files.push((
            "partition.csv".into(),
            csv_string(&["backend", "points", "degree", "cells", "max_cell", "ratio"], rows)?,
        ));
    }
    if !report.assertions.is_empty() {
        let rows = report
            .assertions
            .iter()
            .map(|a| vec![a.name.clone(), a.holds.to_string()])
            .collect();
        files.push(("assertions.csv".into(), csv_string(&["name", "holds"], rows)?));
    }
    if report.is_empty() {
        files.push(("empty.svg".into(), loglog_svg(&report.name, "", "", &[], None, None)));
    }
    Ok(files)
}

/// Writes the artifacts of [`render`] into `outdir` and returns their paths.
pub fn emit_plots(report: &ExperimentReport, outdir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Format(format!("{}: {e}", outdir.display()));
    std::fs::create_dir_all(outdir).map_err(io)?;
    let mut out = Vec::new();
    for (name, body) in render(report)? {
        let path = outdir.join(name);
        std::fs::write(&path, body).map_err(io)?;
        out.push(path);
    }
    Ok(out)
}
