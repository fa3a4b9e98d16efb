//! Denoising diffusion model over decision vectors scaled to `[-1, 1]^d`.

mod net;
mod sampling;
mod schedule;
mod train;

pub use net::{DenoiseNet, NoisePredictor, HIDDEN_UNITS};
pub use sampling::{
    denoise_step, forward_sample, generate_composite, guided_denoise_step, reverse_chains,
    GuidanceFn,
};
pub(crate) use sampling::forward_sample_into;
pub use schedule::{NoiseSchedule, ScheduleConfig};
pub use train::train;

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    pub epochs: usize,
    /// Clamped to the dataset size.
    pub batch: usize,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            epochs: 4000,
            batch: 1024,
            lr: T::lit(1e-3),
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch == 0 || !(self.lr > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "training needs epochs >= 1, batch >= 1 and lr > 0 (got {}, {}, {})",
                self.epochs, self.batch, self.lr
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig<T> {
    /// Guided chains per generation phase.
    pub n_conditional: usize,
    /// Unguided chains per generation phase.
    pub n_unconditional: usize,
    /// Norm bound applied to the guidance gradient.
    pub max_gradient_norm: T,
}

impl<T: Scalar> Default for GenerationConfig<T> {
    fn default() -> Self {
        Self {
            n_conditional: 10,
            n_unconditional: 100,
            max_gradient_norm: T::one(),
        }
    }
}

impl<T: Scalar> GenerationConfig<T> {
    pub fn total(&self) -> usize {
        self.n_conditional + self.n_unconditional
    }
}

/// Affine map from `[lower, upper]` onto `[-1, 1]`.
pub fn to_model_space<T: Scalar>(x: &[T], lower: &[T], upper: &[T]) -> Vec<T> {
    let two = T::lit(2.0);
    x.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&l, &u))| two * (v - l) / (u - l) - T::one())
        .collect()
}

/// Inverse of [`to_model_space`], clipped to the bounds.
pub fn from_model_space<T: Scalar>(z: &[T], lower: &[T], upper: &[T]) -> Vec<T> {
    let half = T::lit(0.5);
    z.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&l, &u))| (l + (v + T::one()) * half * (u - l)).max(l).min(u))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_space_round_trip() {
        let (lo, hi) = ([0.0, -2.0], [1.0, 6.0]);
        let x = [0.25, 5.0];
        let z = to_model_space(&x, &lo, &hi);
        assert_eq!(z, vec![-0.5, 0.75]);
        assert_eq!(from_model_space(&z, &lo, &hi), x.to_vec());
        assert_eq!(from_model_space(&[-3.0, 3.0], &lo, &hi), vec![0.0, 6.0]);
    }

    #[test]
    fn defaults() {
        let t = TrainConfig::<f64>::default();
        assert_eq!((t.epochs, t.batch, t.lr), (4000, 1024, 1e-3));
        let g = GenerationConfig::<f64>::default();
        assert_eq!((g.n_conditional, g.n_unconditional, g.max_gradient_norm), (10, 100, 1.0));
    }
}
