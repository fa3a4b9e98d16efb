//! Elite extraction by shift-based density fitness, entropy-derived objective
//! weights, and the weighted surrogate gradient that steers guided sampling.

mod entropy;
mod fitness;

pub use entropy::{entropy_weights, EntropyWeights};
pub use fitness::{extract_training_set, sde_fitness, select_elites, FitnessVector};

use crate::diffusion::from_model_space;
use crate::surrogate::GpModel;
use crate::{Error, Result, Scalar};

/// Everything needed to turn a diffusion-space sample into a guidance vector.
#[derive(Debug, Clone, Copy)]
pub struct GuidanceContext<'a, T: Scalar> {
    pub models: &'a [GpModel<T>],
    pub weights: &'a EntropyWeights<T>,
    pub lower: &'a [T],
    pub upper: &'a [T],
    pub max_gradient_norm: T,
}

impl<T: Scalar> GuidanceContext<'_, T> {
    pub fn gradient(&self, z: &[T]) -> Result<Vec<T>> {
        weighted_gradient(
            self.models,
            self.weights,
            z,
            self.lower,
            self.upper,
            self.max_gradient_norm,
        )
    }
}

/// Negative weighted sum of surrogate mean gradients at the diffusion-space
/// point `z`, expressed in diffusion coordinates and scaled down to at most
/// `max_gradient_norm` in Euclidean norm.
pub fn weighted_gradient<T: Scalar>(
    models: &[GpModel<T>],
    weights: &EntropyWeights<T>,
    z: &[T],
    lower: &[T],
    upper: &[T],
    max_gradient_norm: T,
) -> Result<Vec<T>> {
    if models.is_empty() {
        return Err(Error::InvalidState("no fitted surrogate models".into()));
    }
    if models.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} surrogate models but {} weights",
            models.len(),
            weights.len()
        )));
    }
    let d = z.len();
    if lower.len() != d || upper.len() != d || models.iter().any(|m| m.dim() != d) {
        return Err(Error::InvalidArgument(format!(
            "guidance point of length {d} does not match the model dimension"
        )));
    }
    if !crate::scalar::all_finite(z.iter().copied()) {
        return Err(Error::InvalidArgument("guidance point must be finite".into()));
    }
    if !(max_gradient_norm > T::zero()) {
        return Err(Error::InvalidArgument("max_gradient_norm must be positive".into()));
    }

    let x = from_model_space(z, lower, upper);
    let mut g = vec![T::zero(); d];
    for (model, &w) in models.iter().zip(weights.as_slice()) {
        if w == T::zero() {
            continue;
        }
        let grad = model.posterior_mean_gradient(&x)?;
        for (gi, &v) in g.iter_mut().zip(&grad) {
            *gi = *gi - w * v;
        }
    }
    let half = T::lit(0.5);
    for (gi, (&l, &u)) in g.iter_mut().zip(lower.iter().zip(upper)) {
        *gi = *gi * (u - l) * half;
    }
    let norm = g.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if norm > max_gradient_norm {
        let s = max_gradient_norm / norm;
        g.iter_mut().for_each(|v| *v = *v * s);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::to_model_space;
    use crate::surrogate::GpConfig;
    use ndarray::{Array1, Array2};
    use rand::Rng;

    fn fit(f: impl Fn(&[f64]) -> f64, lower: &[f64], upper: &[f64], seed: u64) -> GpModel<f64> {
        let mut r = crate::rng::stream(seed, &[]);
        let d = lower.len();
        let x = Array2::from_shape_fn((25, d), |(_, j)| r.random_range(lower[j]..upper[j]));
        let y: Array1<f64> = x.rows().into_iter().map(|row| f(row.as_slice().unwrap())).collect();
        GpModel::fit(x.view(), y.view(), lower, upper, &GpConfig::default(), seed).unwrap()
    }

    #[test]
    fn constant_models_give_zero() {
        let (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
        let m = fit(|_| 3.0, &lo, &hi, 1);
        let w = EntropyWeights::uniform(2);
        let g = weighted_gradient(&[m.clone(), m], &w, &[0.2, -0.3], &lo, &hi, 1.0).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn single_objective_chain_rule() {
        let (lo, hi) = ([-2.0, 0.0, 1.0], [2.0, 1.0, 5.0]);
        let m = fit(|x| x[0] * x[0] + 0.5 * x[1] - x[2], &lo, &hi, 2);
        let w = EntropyWeights::uniform(1);
        let x = [0.7, 0.4, 2.5];
        let z = to_model_space(&x, &lo, &hi);
        let raw = m.posterior_mean_gradient(&x).unwrap();
        let g = weighted_gradient(std::slice::from_ref(&m), &w, &z, &lo, &hi, f64::INFINITY).unwrap();
        for j in 0..3 {
            let expect = -raw[j] * (hi[j] - lo[j]) / 2.0;
            assert!((g[j] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
        let dot: f64 = g.iter().zip(&raw).map(|(a, b)| a * b).sum();
        assert!(dot <= 0.0);
    }

    #[test]
    fn superposition_of_objectives() {
        let (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
        let m1 = fit(|x| x[0] + x[1] * x[1], &lo, &hi, 3);
        let m2 = fit(|x| (x[0] - 1.0).powi(2) + x[1], &lo, &hi, 4);
        let z = [0.1, -0.5];
        let w = 0.3;
        let one = EntropyWeights::uniform(1);
        let g1 = weighted_gradient(std::slice::from_ref(&m1), &one, &z, &lo, &hi, f64::INFINITY).unwrap();
        let g2 = weighted_gradient(std::slice::from_ref(&m2), &one, &z, &lo, &hi, f64::INFINITY).unwrap();
        let both = EntropyWeights::new(vec![w, 1.0 - w]).unwrap();
        let g = weighted_gradient(&[m1, m2], &both, &z, &lo, &hi, f64::INFINITY).unwrap();
        for j in 0..2 {
            let expect = w * g1[j] + (1.0 - w) * g2[j];
            assert!((g[j] - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn norm_clipping_keeps_direction() {
        let (lo, hi) = ([0.0, 0.0], [10.0, 10.0]);
        let m = fit(|x| 40.0 * x[0] - 30.0 * x[1], &lo, &hi, 5);
        let w = EntropyWeights::uniform(1);
        let free = weighted_gradient(std::slice::from_ref(&m), &w, &[0.0, 0.0], &lo, &hi, f64::INFINITY).unwrap();
        let clipped = weighted_gradient(std::slice::from_ref(&m), &w, &[0.0, 0.0], &lo, &hi, 1.0).unwrap();
        let norm: f64 = clipped.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        let free_norm: f64 = free.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..2 {
            assert!((clipped[j] - free[j] / free_norm).abs() < 1e-12);
        }
    }

    #[test]
    fn argument_errors() {
        let (lo, hi) = ([0.0], [1.0]);
        let w = EntropyWeights::<f64>::uniform(1);
        assert!(matches!(
            weighted_gradient(&[], &w, &[0.0], &lo, &hi, 1.0),
            Err(Error::InvalidState(_))
        ));
        let m = fit(|x| x[0], &lo, &hi, 6);
        assert!(weighted_gradient(std::slice::from_ref(&m), &w, &[f64::NAN], &lo, &hi, 1.0).is_err());
        assert!(weighted_gradient(std::slice::from_ref(&m), &EntropyWeights::uniform(2), &[0.0], &lo, &hi, 1.0).is_err());
    }
}
