use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cdmpsl_core::problems::{ProblemRegistry, BUILTIN_PROBLEMS};
use cdmpsl_harness::config::default_output_dir;
use cdmpsl_harness::{emit_plot, execute_experiment, parse_config, ExperimentConfig, ProblemEntry, Variant};
use clap::{Args, Parser, Subcommand};
use walkdir::WalkDir;

/// Multi-objective Bayesian optimization with diffusion-model Pareto set
/// learning.
#[derive(Parser)]
#[command(name = "cdmpsl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single problem/seed/variant cell.
    Run {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "full")]
        variant: Variant,
        /// Take base settings from this configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every cell of a configuration file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds replacing the configured list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Chart history files (or directories containing them).
    Plot {
        /// Output SVG; medians are written beside it as CSV.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// List the built-in benchmark problems.
    ListProblems,
}

#[derive(Args)]
struct Overrides {
    /// Output directory [default: $CDMPSL_OUTPUT_DIR, else runs].
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    n_init: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    /// Diffusion training epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Record measured wall time in history files.
    #[arg(long)]
    record_wall_time: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(v) = self.n_init {
            cfg.run.n_init = v;
        }
        if let Some(v) = self.iterations {
            cfg.run.iterations = v;
        }
        if let Some(v) = self.batch {
            cfg.run.batch = v;
        }
        if let Some(v) = self.epochs {
            cfg.run.train.epochs = v;
        }
        cfg.record_wall_time |= self.record_wall_time;
    }
}

fn load(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn bench(cfg: ExperimentConfig, jobs: Option<usize>) -> Result<ExitCode> {
    cfg.validate()?;
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let summary = execute_experiment(&cfg)?;
    print!("{summary}");
    println!("results in {}", cfg.output_dir.display());
    Ok(if summary.all_succeeded() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn histories(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(input)
                .into_iter()
                .filter_map(|e| e.ok())
                .filter(|e| e.file_name() == cdmpsl_harness::experiment::HISTORY_FILE)
                .map(|e| e.into_path())
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    if out.is_empty() {
        bail!("no history files found");
    }
    Ok(out)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            problem,
            dim,
            seed,
            variant,
            config,
            overrides,
        } => {
            let mut cfg = match &config {
                Some(path) => load(path)?,
                None => ExperimentConfig::new(vec![], vec![], vec![]),
            };
            cfg.problems = vec![ProblemEntry { name: problem, d: dim }];
            cfg.seeds = vec![seed];
            cfg.variants = vec![variant];
            if config.is_none() {
                cfg.output_dir = default_output_dir();
            }
            overrides.apply(&mut cfg);
            bench(cfg, None)
        }
        Command::Bench {
            config,
            seeds,
            jobs,
            overrides,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seeds {
                cfg.seeds = s;
            }
            overrides.apply(&mut cfg);
            bench(cfg, jobs)
        }
        Command::Plot { out, inputs } => {
            let files = histories(&inputs)?;
            let series = emit_plot(&files, &out)?;
            println!(
                "plotted {} runs in {} series to {}",
                files.len(),
                series.len(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ListProblems => {
            let registry = ProblemRegistry::<f64>::with_builtins();
            for name in BUILTIN_PROBLEMS {
                let min_dim = (1..=64).find(|&d| registry.make(name, d).is_ok()).unwrap_or(0);
                let spec = registry.make(name, min_dim.max(1))?;
                println!("{name:<8} objectives={} min_d={min_dim}", spec.n_obj());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
