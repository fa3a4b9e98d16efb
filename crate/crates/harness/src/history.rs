//! Per-run history and final-front files.

use std::fs;
use std::path::Path;

use cdmpsl_core::optimizer::OffspringPolicy;
use cdmpsl_core::RunResult;
use serde::{Deserialize, Serialize};

use crate::config::Variant;
use crate::Error;

/// One row of a history file: the state after initialization (iteration 0)
/// or after an optimization iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub problem: String,
    pub d: usize,
    pub seed: u64,
    pub variant: Variant,
    pub iteration: usize,
    pub cumulative_fe: usize,
    pub hv: f64,
    /// Operator used in this iteration (1 = diffusion model). Row 0 holds the
    /// initial flag.
    pub f_cdm_flag: u8,
    pub wall_seconds: f64,
}

/// Formats `v` with 10 significant digits, like C's `%.10g`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Builds history records from a finished run.
pub fn records_from_result(
    problem: &str,
    d: usize,
    variant: Variant,
    result: &RunResult,
    offspring: OffspringPolicy,
    record_wall_time: bool,
) -> Vec<HistoryRecord> {
    let initial_flag = offspring == OffspringPolicy::Composite;
    result
        .hv_curve
        .iter()
        .enumerate()
        .map(|(i, &(fe, hv))| HistoryRecord {
            problem: problem.to_string(),
            d,
            seed: result.seed,
            variant,
            iteration: i,
            cumulative_fe: fe,
            hv,
            f_cdm_flag: u8::from(if i == 0 { initial_flag } else { result.switch_trace[i - 1] }),
            wall_seconds: if record_wall_time { result.elapsed[i] } else { 0.0 },
        })
        .collect()
}

fn io_error(path: &Path, source: impl Into<std::io::Error>) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: source.into(),
    }
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => io_error(path, e),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes records as comma-separated text with a header row.
pub fn write_history(records: &[HistoryRecord], path: &Path) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record([
        "problem",
        "d",
        "seed",
        "variant",
        "iteration",
        "cumulative_fe",
        "hv",
        "f_cdm_flag",
        "wall_seconds",
    ])
    .map_err(|e| csv_error(path, e))?;
    for r in records {
        w.write_record([
            r.problem.clone(),
            r.d.to_string(),
            r.seed.to_string(),
            r.variant.to_string(),
            r.iteration.to_string(),
            r.cumulative_fe.to_string(),
            format_number(r.hv),
            r.f_cdm_flag.to_string(),
            format_number(r.wall_seconds),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn read_history(path: &Path) -> Result<Vec<HistoryRecord>, Error> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize()
        .collect::<Result<Vec<HistoryRecord>, _>>()
        .map_err(|e| csv_error(path, e))
}

/// Writes the final non-dominated archive rows: decision variables `x0..`
/// followed by objectives `f0..`.
pub fn write_front(result: &RunResult, path: &Path) -> Result<(), Error> {
    let x = result.archive.x();
    let y = result.archive.y();
    let mut header: Vec<String> = (0..x.ncols()).map(|j| format!("x{j}")).collect();
    header.extend((0..y.ncols()).map(|j| format!("f{j}")));
    let mut text = header.join(",");
    text.push('\n');
    for &i in &result.front {
        let row: Vec<String> = x.row(i).iter().chain(y.row(i).iter()).map(|&v| format_number(v)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_matches_printf() {
        // Expected strings from C printf("%.10g").
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (3.2357153042393474, "3.235715304"),
            (4.083347891870255, "4.083347892"),
            (120.5, "120.5"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (12345678901.0, "1.23456789e+10"),
            (1234567890.0, "1234567890"),
            (-0.5, "-0.5"),
            (0.1 + 0.2, "0.3"),
            (9.99999999996, "10"),
        ];
        for (v, s) in cases {
            assert_eq!(format_number(v), s, "{v}");
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("history.csv");
        let records: Vec<HistoryRecord> = (0..21)
            .map(|i| HistoryRecord {
                problem: "zdt1".into(),
                d: 10,
                seed: 3,
                variant: Variant::NoCondition,
                iteration: i,
                cumulative_fe: 100 + 5 * i,
                hv: 1.0 + i as f64 * 0.125,
                f_cdm_flag: (i % 2) as u8,
                wall_seconds: 0.0,
            })
            .collect();
        write_history(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 22);
        assert!(text.ends_with('\n'));
        assert!(text.starts_with("problem,d,seed,variant,iteration,cumulative_fe,hv,f_cdm_flag,wall_seconds\n"));
        assert_eq!(read_history(&path).unwrap(), records);
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = write_history(&[], Path::new("/nonexistent/dir/h.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/h.csv"));
        let err = read_history(Path::new("/nonexistent/h.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/h.csv"));
    }
}
