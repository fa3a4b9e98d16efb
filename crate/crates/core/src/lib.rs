//! Multi-objective Bayesian optimization with composite diffusion-model
//! Pareto set learning.
//!
//! Each iteration fits one Gaussian process per objective, extracts the
//! archive's best solutions by shift-based density fitness, trains a small
//! denoising diffusion model on them, and samples candidates from it: a few
//! reverse chains guided by an entropy-weighted surrogate gradient plus many
//! unguided ones. A hypervolume-greedy batch is evaluated, and the offspring
//! operator falls back to a genetic algorithm whenever hypervolume growth
//! stalls.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod diffusion;
mod error;
pub mod guidance;
pub mod indicators;
pub mod optimizer;
pub mod problems;
pub mod rng;
mod scalar;
pub mod surrogate;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ProblemSpec = problems::ProblemSpec<f64>;
pub type Archive = problems::Archive<f64>;
pub type GpModel = surrogate::GpModel<f64>;
pub type KernelHyper = surrogate::KernelHyper<f64>;
pub type NoiseSchedule = diffusion::NoiseSchedule<f64>;
pub type DenoiseNet = diffusion::DenoiseNet<f64>;
pub type TrainConfig = diffusion::TrainConfig<f64>;
pub type GenerationConfig = diffusion::GenerationConfig<f64>;
pub type EntropyWeights = guidance::EntropyWeights<f64>;
pub type FitnessVector = guidance::FitnessVector<f64>;
pub type RunConfig = optimizer::RunConfig<f64>;
pub type RunResult = optimizer::RunResult<f64>;
pub type SwitchState = optimizer::SwitchState<f64>;
pub type ReferencePoint = indicators::ReferencePoint<f64>;


