//! Runs every (problem, variant, seed) cell of an experiment and persists
//! the results.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use cdmpsl_core::optimizer::{run, PhaseTimings};
use cdmpsl_core::problems::make_problem;
use cdmpsl_core::RunResult;
use rayon::prelude::*;

use crate::config::{snapshot, ExperimentConfig, ProblemEntry, Variant};
use crate::history::{records_from_result, write_front, write_history};
use crate::plot::median;
use crate::Error;

pub const SNAPSHOT_FILE: &str = "config.toml";
pub const HISTORY_FILE: &str = "history.csv";
pub const FRONT_FILE: &str = "front.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub problem: ProblemEntry,
    pub variant: Variant,
    pub seed: u64,
}

impl Cell {
    /// `output_dir/{problem}_{d}/{variant}/{seed}`
    pub fn run_dir(&self, output_dir: &Path) -> PathBuf {
        output_dir
            .join(format!("{}_{}", self.problem.name.to_lowercase(), self.problem.d))
            .join(self.variant.name())
            .join(self.seed.to_string())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} d={} {} seed={}", self.problem.name, self.problem.d, self.variant, self.seed)
    }
}

pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for p in &cfg.problems {
        for &variant in &cfg.variants {
            for &seed in &cfg.seeds {
                out.push(Cell {
                    problem: p.clone(),
                    variant,
                    seed,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct CellReport {
    pub final_hv: f64,
    pub evaluations: usize,
    pub timings: PhaseTimings,
}

#[derive(Debug)]
pub struct CellOutcome {
    pub cell: Cell,
    pub run_dir: PathBuf,
    pub outcome: Result<CellReport, Error>,
}

/// Runs one cell and writes its snapshot, history and front files.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<(RunResult, PathBuf), Error> {
    let spec = make_problem::<f64>(&cell.problem.name, cell.problem.d)?;
    let mut run_cfg = cell.variant.apply(&cfg.run);
    run_cfg.seed = cell.seed;
    let result = run(&spec, &run_cfg)?;

    let dir = cell.run_dir(&cfg.output_dir);
    fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let snap = dir.join(SNAPSHOT_FILE);
    fs::write(&snap, snapshot(&cell.problem, cell.seed, cell.variant, &cfg.run)).map_err(|e| Error::Io {
        path: snap,
        source: e,
    })?;
    let records = records_from_result(
        &cell.problem.name,
        cell.problem.d,
        cell.variant,
        &result,
        run_cfg.offspring,
        cfg.record_wall_time,
    );
    write_history(&records, &dir.join(HISTORY_FILE))?;
    write_front(&result, &dir.join(FRONT_FILE))?;
    Ok((result, dir))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianHv {
    pub problem: String,
    pub d: usize,
    pub variant: Variant,
    pub median_final_hv: f64,
    pub runs: usize,
}

#[derive(Debug)]
pub struct ExperimentSummary {
    pub outcomes: Vec<CellOutcome>,
    pub medians: Vec<MedianHv>,
}

impl ExperimentSummary {
    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.outcomes.iter().filter(|o| o.outcome.is_err())
    }

    pub fn all_succeeded(&self) -> bool {
        self.failures().next().is_none()
    }
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12} {:>4} {:<16} {:>5} {:>14}", "problem", "d", "variant", "runs", "median HV")?;
        for m in &self.medians {
            writeln!(
                f,
                "{:<12} {:>4} {:<16} {:>5} {:>14.6}",
                m.problem, m.d, m.variant, m.runs, m.median_final_hv
            )?;
        }
        for o in self.failures() {
            if let Err(e) = &o.outcome {
                writeln!(f, "FAILED {}: {e}", o.cell)?;
            }
        }
        Ok(())
    }
}

/// Runs all cells (in parallel), recording failures per cell, and summarizes
/// the median final hypervolume per problem and variant.
pub fn execute_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, Error> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::Io {
        path: cfg.output_dir.clone(),
        source: e,
    })?;
    let outcomes: Vec<CellOutcome> = cells(cfg)
        .into_par_iter()
        .map(|cell| {
            let run_dir = cell.run_dir(&cfg.output_dir);
            let outcome = run_cell(cfg, &cell).map(|(r, _)| CellReport {
                final_hv: r.final_hv(),
                evaluations: r.evaluations,
                timings: r.timings,
            });
            CellOutcome {
                cell,
                run_dir,
                outcome,
            }
        })
        .collect();

    let mut medians = Vec::new();
    for p in &cfg.problems {
        for &variant in &cfg.variants {
            let mut hv: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.cell.problem == *p && o.cell.variant == variant)
                .filter_map(|o| o.outcome.as_ref().ok().map(|r| r.final_hv))
                .collect();
            if hv.is_empty() {
                continue;
            }
            medians.push(MedianHv {
                problem: p.name.clone(),
                d: p.d,
                variant,
                runs: hv.len(),
                median_final_hv: median(&mut hv),
            });
        }
    }
    Ok(ExperimentSummary { outcomes, medians })
}
