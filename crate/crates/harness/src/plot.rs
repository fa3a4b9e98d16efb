//! Hypervolume-versus-evaluations charts (SVG) aggregated over seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Variant;
use crate::history::{format_number, read_history, HistoryRecord};
use crate::Error;

/// Order statistics of one variant on one problem, per evaluation count
/// after initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub problem: String,
    pub d: usize,
    pub variant: Variant,
    pub fe: Vec<usize>,
    pub median: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub runs: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

type GroupKey = (String, usize, Variant);

fn run_key(path: &Path, records: &[HistoryRecord]) -> Result<(GroupKey, Vec<usize>), Error> {
    let first = records.first().ok_or_else(|| Error::Alignment {
        path: path.to_path_buf(),
        message: "history file has no records".into(),
    })?;
    let key = (first.problem.clone(), first.d, first.variant);
    if records.iter().any(|r| (&r.problem, r.d, r.variant) != (&key.0, key.1, key.2)) {
        return Err(Error::Alignment {
            path: path.to_path_buf(),
            message: "history mixes problems or variants".into(),
        });
    }
    if records.windows(2).any(|w| w[1].cumulative_fe <= w[0].cumulative_fe) {
        return Err(Error::Alignment {
            path: path.to_path_buf(),
            message: "cumulative_fe is not strictly increasing".into(),
        });
    }
    let start = first.cumulative_fe;
    Ok((key, records.iter().map(|r| r.cumulative_fe - start).collect()))
}

/// Groups runs by problem and variant and computes per-point median, min and
/// max hypervolume. Runs within a group must share the same evaluation grid.
pub fn aggregate(runs: &[(PathBuf, Vec<HistoryRecord>)]) -> Result<Vec<Series>, Error> {
    let mut groups: BTreeMap<GroupKey, (Vec<usize>, Vec<Vec<f64>>)> = BTreeMap::new();
    for (path, records) in runs {
        let (key, grid) = run_key(path, records)?;
        let hv: Vec<f64> = records.iter().map(|r| r.hv).collect();
        match groups.get_mut(&key) {
            Some((expected, curves)) => {
                if *expected != grid {
                    return Err(Error::Alignment {
                        path: path.clone(),
                        message: format!(
                            "evaluation grid differs from other {} runs on {} (d={})",
                            key.2, key.0, key.1
                        ),
                    });
                }
                curves.push(hv);
            }
            None => {
                groups.insert(key, (grid, vec![hv]));
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|((problem, d, variant), (fe, curves))| {
            let mut s = Series {
                problem,
                d,
                variant,
                median: Vec::with_capacity(fe.len()),
                min: Vec::with_capacity(fe.len()),
                max: Vec::with_capacity(fe.len()),
                fe,
                runs: curves.len(),
            };
            for i in 0..s.fe.len() {
                let mut col: Vec<f64> = curves.iter().map(|c| c[i]).collect();
                s.median.push(median(&mut col));
                s.min.push(col[0]);
                s.max.push(col[col.len() - 1]);
            }
            s
        })
        .collect())
}

fn write_medians(series: &[Series], path: &Path) -> Result<(), Error> {
    let mut text = String::from("problem,d,variant,fe,median_hv,min_hv,max_hv,runs\n");
    for s in series {
        for i in 0..s.fe.len() {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{},{}",
                s.problem,
                s.d,
                s.variant,
                s.fe[i],
                format_number(s.median[i]),
                format_number(s.min[i]),
                format_number(s.max[i]),
                s.runs
            );
        }
    }
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#7f7f7f"];
const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 44.0;

fn color(v: Variant) -> &'static str {
    PALETTE[Variant::ALL.iter().position(|&x| x == v).unwrap_or(0)]
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn render_svg(series: &[Series]) -> String {
    let mut panels: BTreeMap<(String, usize), Vec<&Series>> = BTreeMap::new();
    for s in series {
        panels.entry((s.problem.clone(), s.d)).or_default().push(s);
    }
    let cols = panels.len().clamp(1, 3);
    let rows = panels.len().div_ceil(cols).max(1);
    let mut variants: Vec<Variant> = series.iter().map(|s| s.variant).collect();
    variants.sort();
    variants.dedup();
    let legend_h = 28.0;
    let width = cols as f64 * PANEL_W;
    let height = rows as f64 * PANEL_H + legend_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);

    for (idx, ((problem, d), group)) in panels.iter().enumerate() {
        let ox = (idx % cols) as f64 * PANEL_W;
        let oy = (idx / cols) as f64 * PANEL_H;
        let (x0, x1) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
        let (y0, y1) = (oy + PANEL_H - MARGIN_B, oy + MARGIN_T);
        let fe_max = group.iter().flat_map(|s| s.fe.iter().copied()).max().unwrap_or(0).max(1) as f64;
        let mut lo = group.iter().flat_map(|s| s.min.iter().copied()).fold(f64::INFINITY, f64::min);
        let mut hi = group.iter().flat_map(|s| s.max.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            let pad = lo.abs().max(1.0) * 0.05;
            lo -= pad;
            hi += pad;
        }
        let px = |fe: usize| x0 + (x1 - x0) * fe as f64 / fe_max;
        let py = |v: f64| y0 + (y1 - y0) * (v - lo) / (hi - lo);

        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{problem} (d={d})</text>"#,
            (x0 + x1) / 2.0,
            oy + 20.0
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
            x1 - x0,
            y0 - y1
        );
        for t in ticks(0.0, fe_max) {
            let x = x0 + (x1 - x0) * t / fe_max;
            let _ = writeln!(
                svg,
                r##"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="#333"/><text x="{x}" y="{}" text-anchor="middle">{}</text>"##,
                y0 + 4.0,
                y0 + 16.0,
                short(t)
            );
        }
        for t in ticks(lo, hi) {
            let y = py(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="#333"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
                x0 - 4.0,
                x0 - 6.0,
                y + 4.0,
                short(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">evaluations after initialization</text>"#,
            (x0 + x1) / 2.0,
            y0 + 34.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">hypervolume</text>"#,
            ox + 14.0,
            (y0 + y1) / 2.0,
            ox + 14.0,
            (y0 + y1) / 2.0
        );

        for s in group {
            let c = color(s.variant);
            let upper = s.fe.iter().zip(&s.max).map(|(&f, &v)| format!("{:.2},{:.2}", px(f), py(v)));
            let lower = s.fe.iter().zip(&s.min).rev().map(|(&f, &v)| format!("{:.2},{:.2}", px(f), py(v)));
            let band: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{c}" fill-opacity="0.18" stroke="none"/>"#,
                band.join(" ")
            );
            let line: Vec<String> = s
                .fe
                .iter()
                .zip(&s.median)
                .map(|(&f, &v)| format!("{:.2},{:.2}", px(f), py(v)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
    }

    let ly = rows as f64 * PANEL_H + 16.0;
    for (i, v) in variants.iter().enumerate() {
        let lx = 16.0 + i as f64 * 130.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="3"/><text x="{}" y="{ly}">{v}</text>"#,
            ly - 4.0,
            lx + 24.0,
            ly - 4.0,
            color(*v),
            lx + 30.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Path of the medians table written next to a chart.
pub fn medians_path(out_path: &Path) -> PathBuf {
    out_path.with_extension("csv")
}

/// Reads history files, writes an SVG chart to `out_path` and the aggregated
/// medians beside it (same name, `.csv`).
pub fn emit_plot<P: AsRef<Path>>(history_paths: &[P], out_path: &Path) -> Result<Vec<Series>, Error> {
    if history_paths.is_empty() {
        return Err(Error::Config("no history files to plot".into()));
    }
    let runs = history_paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            read_history(p).map(|r| (p.to_path_buf(), r))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let series = aggregate(&runs)?;
    fs::write(out_path, render_svg(&series)).map_err(|e| Error::Io {
        path: out_path.to_path_buf(),
        source: e,
    })?;
    write_medians(&series, &medians_path(out_path))?;
    Ok(series)
}
