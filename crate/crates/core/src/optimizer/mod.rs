//! The outer optimization loop: surrogate fitting, offspring generation,
//! hypervolume-greedy batch selection, true evaluation and operator switching.

mod genetic;
mod selection;
mod switch;

pub use genetic::{ga_offspring, uniform_candidates, GeneticConfig};
pub use selection::{batch_select, greedy_hv_select};
pub use switch::{update_switch, SwitchMode, SwitchState};

use std::time::{Duration, Instant};

use ndarray::{Array1, Array2, ArrayView1};

use crate::diffusion::{
    from_model_space, generate_composite, to_model_space, train, DenoiseNet, GenerationConfig,
    GuidanceFn, ScheduleConfig, TrainConfig,
};
use crate::guidance::{entropy_weights, select_elites, EntropyWeights, GuidanceContext};
use crate::indicators::{hypervolume, nondominated_filter, reference_point, ReferencePoint};
use crate::problems::{latin_hypercube, Archive, ProblemSpec};
use crate::rng::{self, derive_seed, tag};
use crate::surrogate::{GpConfig, GpModel};
use crate::{Error, Result, Scalar};

/// Where each iteration's candidate pool comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffspringPolicy {
    /// Diffusion model, falling back to the genetic operator while the
    /// switch flag says so.
    #[default]
    Composite,
    GeneticOnly,
    /// Uniform samples in the bounds; a baseline.
    UniformRandom,
}

/// How objective gradients are combined for guidance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientWeighting {
    #[default]
    Entropy,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub n_init: usize,
    pub iterations: usize,
    pub batch: usize,
    /// Share of the archive (rounded up) used to train the diffusion model.
    pub extraction_fraction: T,
    pub switch_window: usize,
    pub switch_threshold: T,
    pub switch_mode: SwitchMode,
    pub generation: GenerationConfig<T>,
    pub train: TrainConfig<T>,
    pub schedule: ScheduleConfig,
    pub gp: GpConfig,
    pub genetic: GeneticConfig<T>,
    pub offspring: OffspringPolicy,
    pub weighting: GradientWeighting,
    pub seed: u64,
}

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        Self {
            n_init: 100,
            iterations: 20,
            batch: 5,
            extraction_fraction: T::one() / T::lit(3.0),
            switch_window: 3,
            switch_threshold: T::lit(0.05),
            switch_mode: SwitchMode::Sliding,
            generation: GenerationConfig::default(),
            train: TrainConfig::default(),
            schedule: ScheduleConfig::default(),
            gp: GpConfig::default(),
            genetic: GeneticConfig::default(),
            offspring: OffspringPolicy::Composite,
            weighting: GradientWeighting::Entropy,
            seed: 0,
        }
    }
}

impl<T: Scalar> RunConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_init < 2 {
            return bad(format!("n_init must be at least 2, got {}", self.n_init));
        }
        if self.batch == 0 {
            return bad("batch must be at least 1".into());
        }
        if self.generation.total() < self.batch {
            return bad(format!(
                "candidate pool of {} is smaller than the batch of {}",
                self.generation.total(),
                self.batch
            ));
        }
        if !(self.extraction_fraction > T::zero() && self.extraction_fraction <= T::one()) {
            return bad(format!(
                "extraction_fraction must lie in (0, 1], got {}",
                self.extraction_fraction
            ));
        }
        if self.switch_window == 0 {
            return bad("switch_window must be at least 1".into());
        }
        if !(self.switch_threshold >= T::zero()) {
            return bad(format!(
                "switch_threshold must be nonnegative, got {}",
                self.switch_threshold
            ));
        }
        if !(self.generation.max_gradient_norm > T::zero()) {
            return bad("max_gradient_norm must be positive".into());
        }
        self.train.validate()?;
        self.gp.validate()?;
        Ok(())
    }

    fn elite_count(&self, n: usize) -> usize {
        let c = (self.extraction_fraction * T::from_usize_lossy(n)).ceil();
        c.to_usize().unwrap_or(n).clamp(1, n)
    }
}

/// Wall time spent per phase over a whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub surrogate: Duration,
    pub training: Duration,
    pub conditional: Duration,
    pub unconditional: Duration,
    pub genetic: Duration,
    pub selection: Duration,
    pub evaluation: Duration,
    pub total: Duration,
}

impl PhaseTimings {
    /// Everything except diffusion training and sampling.
    pub fn other(&self) -> Duration {
        self.total
            .saturating_sub(self.training + self.conditional + self.unconditional)
    }
}

#[derive(Debug, Clone)]
pub struct RunResult<T: Scalar> {
    pub archive: Archive<T>,
    pub reference_point: ReferencePoint<T>,
    /// `(cumulative evaluations, archive hypervolume)` after initialization
    /// and after each iteration.
    pub hv_curve: Vec<(usize, T)>,
    /// Whether each iteration drew offspring from the diffusion model.
    pub switch_trace: Vec<bool>,
    /// Seconds since the start of the run, aligned with `hv_curve`.
    pub elapsed: Vec<f64>,
    /// Archive rows on the final non-dominated front.
    pub front: Vec<usize>,
    pub evaluations: usize,
    pub seed: u64,
    pub timings: PhaseTimings,
}

impl<T: Scalar> RunResult<T> {
    pub fn final_hv(&self) -> T {
        self.hv_curve.last().map(|p| p.1).unwrap_or_else(T::zero)
    }

    pub fn front_objectives(&self) -> Array2<T> {
        self.archive.select_y(&self.front)
    }
}

fn archive_hv<T: Scalar>(archive: &Archive<T>, r: &ReferencePoint<T>) -> Result<T> {
    let rows: Vec<Vec<T>> = archive.y().rows().into_iter().map(|r| r.to_vec()).collect();
    hypervolume(&rows, r)
}

fn fit_models<T: Scalar>(
    archive: &Archive<T>,
    spec: &ProblemSpec<T>,
    cfg: &GpConfig,
    seed: u64,
) -> Result<Vec<GpModel<T>>> {
    (0..spec.n_obj())
        .map(|j| {
            GpModel::fit(
                archive.x(),
                archive.y().column(j),
                spec.lower(),
                spec.upper(),
                cfg,
                derive_seed(seed, &[j as u64]),
            )
        })
        .collect()
}

struct Loop<'a, T: Scalar> {
    spec: &'a ProblemSpec<T>,
    cfg: &'a RunConfig<T>,
    archive: Archive<T>,
    timings: PhaseTimings,
    evaluations: usize,
}

impl<T: Scalar> Loop<'_, T> {
    fn evaluate_rows(&mut self, x: &Array2<T>) -> Result<()> {
        let start = Instant::now();
        for row in x.rows() {
            let xv = row.to_vec();
            let y = self.spec.evaluate(&xv)?;
            self.evaluations += 1;
            self.archive.push(row, ArrayView1::from(&y[..]))?;
        }
        self.timings.evaluation += start.elapsed();
        Ok(())
    }

    fn diffusion_pool(&mut self, models: &[GpModel<T>], seed: u64) -> Result<Array2<T>> {
        let (spec, cfg) = (self.spec, self.cfg);
        let (lower, upper) = (spec.lower(), spec.upper());
        let elites = select_elites(self.archive.y(), cfg.elite_count(self.archive.len()))?;
        let elite_x = self.archive.select_x(&elites);
        let mut data = Array2::zeros(elite_x.raw_dim());
        for (mut dst, src) in data.rows_mut().into_iter().zip(elite_x.rows()) {
            let z = to_model_space(&src.to_vec(), lower, upper);
            dst.assign(&ArrayView1::from(&z[..]));
        }

        let weights = match cfg.weighting {
            GradientWeighting::Entropy if elites.len() >= 2 => {
                entropy_weights(self.archive.select_y(&elites).view())?
            }
            _ => EntropyWeights::uniform(spec.n_obj()),
        };

        let start = Instant::now();
        let sched = cfg.schedule.build::<T>()?;
        let net = DenoiseNet::new(spec.dim(), &mut rng::stream(seed, &[tag::NET_INIT]));
        let (net, _) = train(net, data.view(), &sched, &cfg.train, seed)?;
        self.timings.training += start.elapsed();

        let ctx = GuidanceContext {
            models,
            weights: &weights,
            lower,
            upper,
            max_gradient_norm: cfg.generation.max_gradient_norm,
        };
        let guide = |z: &[T]| ctx.gradient(z);
        let guide: &GuidanceFn<'_, T> = &guide;

        let gen = &cfg.generation;
        let start = Instant::now();
        let cond = generate_composite(
            &net,
            &sched,
            &GenerationConfig {
                n_unconditional: 0,
                ..gen.clone()
            },
            Some(guide),
            seed,
        )?;
        self.timings.conditional += start.elapsed();
        let start = Instant::now();
        let uncond = crate::diffusion::reverse_chains(
            &net,
            &sched,
            gen.n_conditional,
            gen.n_unconditional,
            None,
            seed,
        )?;
        self.timings.unconditional += start.elapsed();

        let mut pool = Array2::zeros((gen.total(), spec.dim()));
        for (mut dst, src) in pool.rows_mut().into_iter().zip(cond.rows().into_iter().chain(uncond.rows())) {
            let x = from_model_space(&src.to_vec(), lower, upper);
            dst.assign(&Array1::from(x));
        }
        Ok(pool)
    }

    fn iterate(
        &mut self,
        k: usize,
        use_diffusion: bool,
        r: &ReferencePoint<T>,
    ) -> Result<()> {
        let cfg = self.cfg;
        let iter_seed = derive_seed(cfg.seed, &[k as u64 + 1]);

        let start = Instant::now();
        let models = fit_models(&self.archive, self.spec, &cfg.gp, derive_seed(iter_seed, &[tag::GP]))?;
        self.timings.surrogate += start.elapsed();

        let pool_size = cfg.generation.total();
        let pool = match cfg.offspring {
            OffspringPolicy::Composite if use_diffusion => {
                self.diffusion_pool(&models, derive_seed(iter_seed, &[tag::GENERATE]))?
            }
            OffspringPolicy::UniformRandom => {
                let start = Instant::now();
                let p = uniform_candidates(self.spec, pool_size, iter_seed);
                self.timings.genetic += start.elapsed();
                p
            }
            _ => {
                let start = Instant::now();
                let p = ga_offspring(&self.archive, pool_size, self.spec, &cfg.genetic, iter_seed)?;
                self.timings.genetic += start.elapsed();
                p
            }
        };

        let start = Instant::now();
        let picked = batch_select(pool.view(), &models, &self.archive, r, cfg.batch)?;
        self.timings.selection += start.elapsed();
        let chosen = pool.select(ndarray::Axis(0), &picked);
        self.evaluate_rows(&chosen)
    }
}

/// Runs the full optimization loop on `spec`. Every random choice derives
/// from `cfg.seed`, so equal configurations give identical results.
pub fn run<T: Scalar>(spec: &ProblemSpec<T>, cfg: &RunConfig<T>) -> Result<RunResult<T>> {
    cfg.validate()?;
    let clock = Instant::now();
    let mut state = Loop {
        spec,
        cfg,
        archive: Archive::new(spec.dim(), spec.n_obj()),
        timings: PhaseTimings::default(),
        evaluations: 0,
    };

    let x0 = latin_hypercube(cfg.n_init, spec, cfg.seed)?;
    state.evaluate_rows(&x0)?;
    let r = reference_point(state.archive.y())?;

    let mut switch = SwitchState::default();
    let hv0 = archive_hv(&state.archive, &r)?;
    switch.hv_history.push(hv0);
    let mut hv_curve = vec![(state.evaluations, hv0)];
    let mut elapsed = vec![clock.elapsed().as_secs_f64()];
    let mut switch_trace = Vec::with_capacity(cfg.iterations);

    for k in 0..cfg.iterations {
        let use_diffusion = switch.use_diffusion && cfg.offspring == OffspringPolicy::Composite;
        switch_trace.push(use_diffusion);
        state
            .iterate(k, use_diffusion, &r)
            .map_err(|e| e.at_iteration(k + 1))?;
        let hv = archive_hv(&state.archive, &r).map_err(|e| e.at_iteration(k + 1))?;
        switch.hv_history.push(hv);
        if cfg.offspring == OffspringPolicy::Composite {
            switch.update(cfg.switch_window, cfg.switch_threshold, cfg.switch_mode);
        }
        hv_curve.push((state.evaluations, hv));
        elapsed.push(clock.elapsed().as_secs_f64());
    }

    let front = nondominated_filter(state.archive.y());
    let mut timings = state.timings;
    timings.total = clock.elapsed();
    Ok(RunResult {
        archive: state.archive,
        reference_point: r,
        hv_curve,
        switch_trace,
        elapsed,
        front,
        evaluations: state.evaluations,
        seed: cfg.seed,
        timings,
    })
}
