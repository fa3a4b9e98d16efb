//! Experiment configuration documents (TOML).
//!
//! ```toml
//! problems = [{ name = "zdt1", d = 10 }, { name = "dtlz2", d = 10 }]
//! seeds = [0, 1, 2]
//! variants = ["full", "no_dm"]     # or: variant = "full"
//! output_dir = "runs"
//! record_wall_time = false
//!
//! [run]
//! n_init = 100
//! iterations = 20
//! batch = 5
//!
//! [run.train]
//! epochs = 4000
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cdmpsl_core::optimizer::{GradientWeighting, OffspringPolicy, SwitchMode};
use cdmpsl_core::problems::ProblemRegistry;
use cdmpsl_core::RunConfig;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Algorithm variant, each a fixed rewrite of the base [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    /// Uniform objective weights for guidance.
    NoWeight,
    /// All diffusion samples unguided, pool size unchanged.
    NoCondition,
    /// Operator switching disabled.
    NoSwitch,
    /// Genetic operator only.
    NoDm,
    /// Uniform candidates in the bounds.
    RandomBaseline,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Full,
        Variant::NoWeight,
        Variant::NoCondition,
        Variant::NoSwitch,
        Variant::NoDm,
        Variant::RandomBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoWeight => "no_weight",
            Variant::NoCondition => "no_condition",
            Variant::NoSwitch => "no_switch",
            Variant::NoDm => "no_dm",
            Variant::RandomBaseline => "random_baseline",
        }
    }

    pub fn apply(self, base: &RunConfig) -> RunConfig {
        let mut cfg = base.clone();
        match self {
            Variant::Full => {}
            Variant::NoWeight => cfg.weighting = GradientWeighting::Uniform,
            Variant::NoCondition => {
                cfg.generation.n_unconditional += cfg.generation.n_conditional;
                cfg.generation.n_conditional = 0;
            }
            Variant::NoSwitch => cfg.switch_threshold = 0.0,
            Variant::NoDm => cfg.offspring = OffspringPolicy::GeneticOnly,
            Variant::RandomBaseline => cfg.offspring = OffspringPolicy::UniformRandom,
        }
        cfg
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemEntry {
    pub name: String,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemEntry>,
    pub seeds: Vec<u64>,
    pub variants: Vec<Variant>,
    pub output_dir: PathBuf,
    /// Write measured wall time into history files. Off by default so that
    /// repeated runs produce identical files.
    pub record_wall_time: bool,
    /// Base settings; `seed` is replaced per cell.
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn new(problems: Vec<ProblemEntry>, seeds: Vec<u64>, variants: Vec<Variant>) -> Self {
        Self {
            problems,
            seeds,
            variants,
            output_dir: default_output_dir(),
            record_wall_time: false,
            run: RunConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.problems.is_empty() {
            return Err(Error::Config("at least one problem is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("at least one variant is required".into()));
        }
        let registry = ProblemRegistry::<f64>::with_builtins();
        for p in &self.problems {
            registry.make(&p.name, p.d)?;
        }
        for v in &self.variants {
            v.apply(&self.run).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    problems: Option<Vec<ProblemEntry>>,
    seeds: Option<Vec<u64>>,
    variant: Option<Variant>,
    variants: Option<Vec<Variant>>,
    output_dir: Option<PathBuf>,
    record_wall_time: Option<bool>,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    n_init: Option<usize>,
    iterations: Option<usize>,
    batch: Option<usize>,
    extraction_fraction: Option<f64>,
    switch_window: Option<usize>,
    switch_threshold: Option<f64>,
    switch_mode: Option<RawSwitchMode>,
    #[serde(default)]
    generation: RawGeneration,
    #[serde(default)]
    train: RawTrain,
    #[serde(default)]
    schedule: RawSchedule,
    #[serde(default)]
    gp: RawGp,
    #[serde(default)]
    genetic: RawGenetic,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawSwitchMode {
    Sliding,
    Blocked,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneration {
    n_conditional: Option<usize>,
    n_unconditional: Option<usize>,
    max_gradient_norm: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    epochs: Option<usize>,
    batch: Option<usize>,
    lr: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    eps: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    steps: Option<usize>,
    beta_min: Option<f64>,
    beta_max: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGp {
    restarts: Option<usize>,
    max_iter: Option<usize>,
    f_tol: Option<f64>,
    signal_variance_range: Option<(f64, f64)>,
    lengthscale_range: Option<(f64, f64)>,
    noise_variance_range: Option<(f64, f64)>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenetic {
    crossover_eta: Option<f64>,
    crossover_rate: Option<f64>,
    mutation_eta: Option<f64>,
    mutation_rate: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RawRun {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.n_init, self.n_init);
        set(&mut cfg.iterations, self.iterations);
        set(&mut cfg.batch, self.batch);
        set(&mut cfg.extraction_fraction, self.extraction_fraction);
        set(&mut cfg.switch_window, self.switch_window);
        set(&mut cfg.switch_threshold, self.switch_threshold);
        set(
            &mut cfg.switch_mode,
            self.switch_mode.map(|m| match m {
                RawSwitchMode::Sliding => SwitchMode::Sliding,
                RawSwitchMode::Blocked => SwitchMode::Blocked,
            }),
        );
        let g = &mut cfg.generation;
        set(&mut g.n_conditional, self.generation.n_conditional);
        set(&mut g.n_unconditional, self.generation.n_unconditional);
        set(&mut g.max_gradient_norm, self.generation.max_gradient_norm);
        let t = &mut cfg.train;
        set(&mut t.epochs, self.train.epochs);
        set(&mut t.batch, self.train.batch);
        set(&mut t.lr, self.train.lr);
        set(&mut t.beta1, self.train.beta1);
        set(&mut t.beta2, self.train.beta2);
        set(&mut t.eps, self.train.eps);
        let s = &mut cfg.schedule;
        set(&mut s.steps, self.schedule.steps);
        set(&mut s.beta_min, self.schedule.beta_min);
        set(&mut s.beta_max, self.schedule.beta_max);
        let gp = &mut cfg.gp;
        set(&mut gp.restarts, self.gp.restarts);
        set(&mut gp.max_iter, self.gp.max_iter);
        set(&mut gp.f_tol, self.gp.f_tol);
        set(&mut gp.signal_variance_range, self.gp.signal_variance_range);
        set(&mut gp.lengthscale_range, self.gp.lengthscale_range);
        set(&mut gp.noise_variance_range, self.gp.noise_variance_range);
        let ga = &mut cfg.genetic;
        set(&mut ga.crossover_eta, self.genetic.crossover_eta);
        set(&mut ga.crossover_rate, self.genetic.crossover_rate);
        set(&mut ga.mutation_eta, self.genetic.mutation_eta);
        if self.genetic.mutation_rate.is_some() {
            ga.mutation_rate = self.genetic.mutation_rate;
        }
    }

    fn from_config(cfg: &RunConfig) -> Self {
        Self {
            n_init: Some(cfg.n_init),
            iterations: Some(cfg.iterations),
            batch: Some(cfg.batch),
            extraction_fraction: Some(cfg.extraction_fraction),
            switch_window: Some(cfg.switch_window),
            switch_threshold: Some(cfg.switch_threshold),
            switch_mode: Some(match cfg.switch_mode {
                SwitchMode::Sliding => RawSwitchMode::Sliding,
                SwitchMode::Blocked => RawSwitchMode::Blocked,
            }),
            generation: RawGeneration {
                n_conditional: Some(cfg.generation.n_conditional),
                n_unconditional: Some(cfg.generation.n_unconditional),
                max_gradient_norm: Some(cfg.generation.max_gradient_norm),
            },
            train: RawTrain {
                epochs: Some(cfg.train.epochs),
                batch: Some(cfg.train.batch),
                lr: Some(cfg.train.lr),
                beta1: Some(cfg.train.beta1),
                beta2: Some(cfg.train.beta2),
                eps: Some(cfg.train.eps),
            },
            schedule: RawSchedule {
                steps: Some(cfg.schedule.steps),
                beta_min: Some(cfg.schedule.beta_min),
                beta_max: Some(cfg.schedule.beta_max),
            },
            gp: RawGp {
                restarts: Some(cfg.gp.restarts),
                max_iter: Some(cfg.gp.max_iter),
                f_tol: Some(cfg.gp.f_tol),
                signal_variance_range: Some(cfg.gp.signal_variance_range),
                lengthscale_range: Some(cfg.gp.lengthscale_range),
                noise_variance_range: Some(cfg.gp.noise_variance_range),
            },
            genetic: RawGenetic {
                crossover_eta: Some(cfg.genetic.crossover_eta),
                crossover_rate: Some(cfg.genetic.crossover_rate),
                mutation_eta: Some(cfg.genetic.mutation_eta),
                mutation_rate: cfg.genetic.mutation_rate,
            },
        }
    }
}

/// `$CDMPSL_OUTPUT_DIR` if set, else `runs`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(crate::OUTPUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// 1-based line of the first top-level occurrence of `key`, for messages.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.starts_with(key) && l[key.len()..].trim_start().starts_with('=')
        })
        .map(|i| i + 1)
}

fn with_line(text: &str, key: &str, msg: String) -> Error {
    match line_of(text, key) {
        Some(line) => Error::Config(format!("line {line}: {msg}")),
        None => Error::Config(msg),
    }
}

/// Parses and validates an experiment document, filling unspecified
/// settings from the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Error> {
    let raw: RawExperiment = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;

    let problems = raw.problems.unwrap_or_default();
    if problems.is_empty() {
        return Err(with_line(text, "problems", "at least one problem is required".into()));
    }
    let seeds = raw.seeds.unwrap_or_default();
    if seeds.is_empty() {
        return Err(with_line(text, "seeds", "at least one seed is required".into()));
    }
    let variants = match (raw.variant, raw.variants) {
        (Some(_), Some(_)) => {
            return Err(with_line(
                text,
                "variants",
                "give either `variant` or `variants`, not both".into(),
            ))
        }
        (Some(v), None) => vec![v],
        (None, Some(vs)) if vs.is_empty() => {
            return Err(with_line(text, "variants", "`variants` must not be empty".into()))
        }
        (None, Some(vs)) => vs,
        (None, None) => vec![Variant::Full],
    };

    let mut run = RunConfig::default();
    raw.run.apply(&mut run);
    let cfg = ExperimentConfig {
        problems,
        seeds,
        variants,
        output_dir: raw.output_dir.unwrap_or_else(default_output_dir),
        record_wall_time: raw.record_wall_time.unwrap_or(false),
        run,
    };
    cfg.validate().map_err(|e| match e {
        Error::Core(cdmpsl_core::Error::UnsupportedProblem(_) | cdmpsl_core::Error::InvalidDimension { .. }) => {
            with_line(text, "problems", e.to_string())
        }
        other => other,
    })?;
    Ok(cfg)
}

/// Snapshot of everything that determines one run, as a TOML document that
/// [`parse_config`] accepts.
pub fn snapshot(problem: &ProblemEntry, seed: u64, variant: Variant, run: &RunConfig) -> String {
    let raw = RawExperiment {
        problems: Some(vec![problem.clone()]),
        seeds: Some(vec![seed]),
        variant: Some(variant),
        variants: None,
        output_dir: None,
        record_wall_time: None,
        run: RawRun::from_config(run),
    };
    toml::to_string(&raw).expect("configuration values are always representable")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "problems = [{ name = \"zdt1\", d = 10 }]\nseeds = [0]\n";

    #[test]
    fn minimal_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.run.n_init, 100);
        assert_eq!(cfg.run.iterations, 20);
        assert_eq!(cfg.run.batch, 5);
        assert_eq!(cfg.run.schedule.steps, 25);
        assert_eq!(cfg.variants, vec![Variant::Full]);
        assert!(!cfg.record_wall_time);
    }

    #[test]
    fn overrides_and_variants() {
        let text = r#"
problems = [{ name = "dtlz2", d = 6 }]
seeds = [1, 2]
variant = "no_dm"
output_dir = "/tmp/x"

[run]
iterations = 4
switch_mode = "blocked"

[run.train]
epochs = 10
lr = 1e-4

[run.generation]
n_conditional = 3
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.variants, vec![Variant::NoDm]);
        assert_eq!(cfg.run.iterations, 4);
        assert_eq!(cfg.run.switch_mode, SwitchMode::Blocked);
        assert_eq!((cfg.run.train.epochs, cfg.run.train.lr), (10, 1e-4));
        assert_eq!(cfg.run.generation.n_conditional, 3);
        assert_eq!(cfg.run.generation.n_unconditional, 100);
        assert_eq!(Variant::NoDm.apply(&cfg.run).offspring, OffspringPolicy::GeneticOnly);
    }

    #[test]
    fn variant_wiring() {
        let base = RunConfig::default();
        let nc = Variant::NoCondition.apply(&base);
        assert_eq!((nc.generation.n_conditional, nc.generation.n_unconditional), (0, 110));
        assert_eq!(Variant::NoSwitch.apply(&base).switch_threshold, 0.0);
        assert_eq!(Variant::NoWeight.apply(&base).weighting, GradientWeighting::Uniform);
        assert_eq!(Variant::RandomBaseline.apply(&base).offspring, OffspringPolicy::UniformRandom);
        assert_eq!(Variant::Full.apply(&base), base);
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("best".parse::<Variant>().is_err());
    }

    #[test]
    fn errors_carry_line_context() {
        let err = parse_config("seeds = [0]\nproblems = []\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse_config("problems = [{ name = \"zdt1\", d = 10 }]\nseeds = [0]\nbogus = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus") && err.contains('3'), "{err}");
        let err = parse_config("problems = [{ name = \"zdt1\", d = 10 }]\nseeds = [0]\n[run]\nbatch = \"five\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 4"), "{err}");
        let err = parse_config("problems = [{ name = \"zdt9\", d = 10 }]\nseeds = [0]\n").unwrap_err().to_string();
        assert!(err.contains("line 1") && err.contains("zdt9"), "{err}");
        assert!(parse_config("problems = [{ name = \"zdt1\", d = 10 }]\n").is_err());
        assert!(parse_config(&format!("{MINIMAL}variant = \"worst\"\n")).is_err());
        assert!(parse_config(&format!("{MINIMAL}[run]\nbatch = 0\n")).is_err());
    }

    #[test]
    fn snapshot_round_trips() {
        let mut run = RunConfig::default();
        run.iterations = 7;
        run.genetic.mutation_rate = Some(0.2);
        let problem = ProblemEntry { name: "zdt3".into(), d: 5 };
        let text = snapshot(&problem, 4, Variant::NoSwitch, &run);
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.problems, vec![problem]);
        assert_eq!(cfg.seeds, vec![4]);
        assert_eq!(cfg.variants, vec![Variant::NoSwitch]);
        assert_eq!(cfg.run, run);
    }
}
